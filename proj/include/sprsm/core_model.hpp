/*
 * Copyright 2026 The sprsm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sprsm/linalg.hpp"

namespace sprsm
{
/// argmin over X of L_beta(x, y, lambda) + 1/2 |x - x_prev|_S^2.
using XSubproblem = std::function<Vector(const Vector& y,
                                         const Vector& lambda,
                                         double beta,
                                         const ProxMatrix& S,
                                         const Vector& x_prev)>;

/// argmin over Y of L_beta(x, y, lambda_half) + 1/2 |y - y_prev|_T^2.
using YSubproblem = std::function<Vector(const Vector& x,
                                         const Vector& lambda_half,
                                         double beta,
                                         const ProxMatrix& T,
                                         const Vector& y_prev)>;

using ObjectiveFn = std::function<double(const Vector& x, const Vector& y)>;

/// A subgradient selection of theta_1 or theta_2 at a point.
using SubgradientFn = std::function<Vector(const Vector&)>;

/// min theta1(x) + theta2(y)  s.t.  A x + B y = b,  x in X, y in Y.
/// X, Y and the thetas live inside the oracles.
struct SplitProblem
{
    XSubproblem x_subproblem;
    YSubproblem y_subproblem;
    LinearMap A;
    LinearMap B;
    Vector b;
    /// Strong-convexity moduli of theta1 / theta2 (zero unless supplied).
    ProxMatrix sigma1;
    ProxMatrix sigma2;
    ObjectiveFn objective;
    /// Optional, only the diagnostics need them.
    SubgradientFn subgradient_x;
    SubgradientFn subgradient_y;

    Index n1() const { return A.cols(); }
    Index n2() const { return B.cols(); }
    Index m() const { return b.size(); }

    /// Throws std::invalid_argument on shape mismatch or a non-PSD modulus.
    void validate() const;
};

enum class DomainMode
{
    Primary,
    Extended,
    NegativeAlpha,
    HMY
};

enum class StopRule
{
    Full,
    Cheap
};

struct SolverParams
{
    double alpha = 0.0;
    double gamma = 1.0;
    double beta = 1.0;
    ProxMatrix S;
    ProxMatrix T;
    DomainMode domain_mode = DomainMode::Primary;
    /// Off only for methods outside every convergence domain (plain PRSM).
    bool enforce_domain = true;
    double tol = 1e-6;
    int max_iters = 1000;
    StopRule stop_rule = StopRule::Full;
    /// Keep every stride-th iterate in the run record; 0 keeps only the
    /// first and last.
    int snapshot_stride = 1;

    /// Throws std::invalid_argument if the parameters are unusable for a
    /// problem with the given block sizes.
    void validate(Index n1, Index n2) const;
};

struct IterState
{
    Vector x;
    Vector y;
    Vector y_prev;
    Vector lambda;
    Vector lambda_half;
    Vector r;
    int k = 0;
};

/// Result of a parameter-domain test. Converts to true when accepted.
struct Validation
{
    bool accepted = true;
    std::string reason;

    explicit operator bool() const { return accepted; }
    static Validation accept() { return {}; }
    static Validation reject(std::string why) { return {false, std::move(why)}; }
};

/// Upper end of the step-size interval for gamma at a given alpha:
/// (1 - a + sqrt((1 + a)^2 + 4(1 - a^2))) / 2.
double primary_gamma_bound(double alpha);

Validation validate_params(double alpha, double gamma, DomainMode mode);

std::string to_string(DomainMode mode);
std::optional<DomainMode> parse_domain_mode(const std::string& s);

// Matrices of the contraction analysis. All dense; used for audits only.

/// H on (y, lambda), size (n2 + m).
Matrix build_H(const Matrix& B, double alpha, double gamma, double beta);
/// M = [[I, 0], [alpha beta B, (alpha + gamma) beta I]].
Matrix build_M(const Matrix& B, double alpha, double gamma, double beta);
/// max |M^T H M - diag((1 - alpha) beta B^T B, (alpha + gamma) beta I)|.
double check_MtHM(const Matrix& B, double alpha, double gamma, double beta);

/// G = blockdiag(S, [T + H_yy, H_ylambda; H_lambday, H_lambdalambda]),
/// size (n1 + n2 + m).
Matrix build_G(const Matrix& S,
               const Matrix& T,
               const Matrix& B,
               double alpha,
               double gamma,
               double beta);
/// Ghat = G + blockdiag(Sigma1, Sigma2, 0).
Matrix build_Ghat(const Matrix& sigma1,
                  const Matrix& sigma2,
                  const Matrix& S,
                  const Matrix& T,
                  const Matrix& B,
                  double alpha,
                  double gamma,
                  double beta);

/// dw^T G dw with the dense matrix.
double g_norm_sq(const Matrix& G, const Vector& dw);

/// |(dy, dlambda)|_H^2 without forming H.
double h_norm_sq(const LinearMap& B,
                 double alpha,
                 double gamma,
                 double beta,
                 const Vector& dy,
                 const Vector& dlambda);

/// |dw|_G^2 = |dx|_S^2 + |dy|_T^2 + |(dy, dlambda)|_H^2 without forming G.
double g_norm_sq_split(const SolverParams& params,
                       const LinearMap& B,
                       const Vector& dx,
                       const Vector& dy,
                       const Vector& dlambda);

/// |dw|_Ghat^2 = |(dx, dy)|_Sigma^2 + |dw|_G^2 without forming Ghat.
double ghat_norm_sq_split(const SplitProblem& problem,
                          const SolverParams& params,
                          const Vector& dx,
                          const Vector& dy,
                          const Vector& dlambda);

enum class ContractionCase
{
    GammaBelowOne,  // I
    GammaOne,       // II
    GammaAboveOne   // III
};

struct ContractionConstants
{
    ContractionCase which = ContractionCase::GammaOne;
    double rho = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    double tau_hat = 0.0;
    std::optional<double> delta;
};

/// Admissible open interval for delta when gamma > 1.
std::pair<double, double> delta_interval(double alpha, double gamma);

/// Constants of the contraction inequality. For gamma > 1 the free
/// parameter delta defaults to the midpoint of its interval; an override
/// must lie strictly inside it. Throws std::invalid_argument outside the
/// Primary domain.
ContractionConstants contraction_constants(
    double alpha, double gamma, std::optional<double> delta = std::nullopt);

/// (2(a+g) - a g - a sqrt(g^2 + 4(a+g))) / (2(a+g)).
double c0_constant(double alpha, double gamma);
/// c0 / (1 - alpha); alpha = 1 is rejected.
double c_alpha_gamma(double alpha, double gamma);

}  // namespace sprsm
