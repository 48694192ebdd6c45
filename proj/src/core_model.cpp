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

#include "sprsm/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sprsm
{
namespace
{
constexpr double kGolden = std::numbers::phi;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_symmetric_psd(const ProxMatrix& q,
                         Index n,
                         bool require_psd,
                         const char* what)
{
    if (q.is_zero())
    {
        return;
    }
    if (q.dim() != n)
    {
        throw std::invalid_argument(std::string(what) + ": dimension "
                                    + std::to_string(q.dim()) + ", expected "
                                    + std::to_string(n));
    }
    if (q.kind() == ProxMatrix::Kind::ShiftedGram)
    {
        if (!require_psd || (q.shift() >= 0.0 && q.gram_coeff() >= 0.0))
        {
            return;
        }
    }
    const Matrix dense = q.to_dense(n);
    const double scale = 1.0 + dense.cwiseAbs().maxCoeff();
    if (asymmetry(dense) > 1e-12 * scale)
    {
        throw std::invalid_argument(std::string(what) + " is not symmetric");
    }
    if (require_psd && symmetric_min_eigenvalue(dense) < -1e-10)
    {
        throw std::invalid_argument(std::string(what)
                                    + " is not positive semidefinite");
    }
}

Validation primary_test(double alpha, double gamma)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
    {
        return Validation::reject("alpha=" + fmt(alpha)
                                  + " violates 0 <= alpha < 1");
    }
    if (!(gamma > 0.0))
    {
        return Validation::reject("gamma=" + fmt(gamma) + " violates gamma > 0");
    }
    const double bound = primary_gamma_bound(alpha);
    if (!(gamma < bound))
    {
        return Validation::reject("gamma=" + fmt(gamma) + " violates gamma < "
                                  + fmt(bound));
    }
    return Validation::accept();
}

}  // namespace

void SplitProblem::validate() const
{
    if (!x_subproblem || !y_subproblem)
    {
        throw std::invalid_argument("SplitProblem: missing subproblem oracle");
    }
    if (A.rows() != b.size())
    {
        throw std::invalid_argument("SplitProblem: A has "
                                    + std::to_string(A.rows())
                                    + " rows but b has length "
                                    + std::to_string(b.size()));
    }
    if (B.rows() != b.size())
    {
        throw std::invalid_argument("SplitProblem: B has "
                                    + std::to_string(B.rows())
                                    + " rows but b has length "
                                    + std::to_string(b.size()));
    }
    check_symmetric_psd(sigma1, n1(), true, "sigma1");
    check_symmetric_psd(sigma2, n2(), true, "sigma2");
}

void SolverParams::validate(Index n1, Index n2) const
{
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("beta must be positive");
    }
    if (!(tol > 0.0))
    {
        throw std::invalid_argument("tol must be positive");
    }
    if (max_iters < 0)
    {
        throw std::invalid_argument("max_iters must be nonnegative");
    }
    if (snapshot_stride < 0)
    {
        throw std::invalid_argument("snapshot_stride must be nonnegative");
    }
    check_symmetric_psd(S, n1, false, "S");
    check_symmetric_psd(T, n2, true, "T");
    if (enforce_domain)
    {
        const Validation v = validate_params(alpha, gamma, domain_mode);
        if (!v)
        {
            throw std::invalid_argument("(alpha, gamma) outside the "
                                        + to_string(domain_mode)
                                        + " domain: " + v.reason);
        }
    }
}

double primary_gamma_bound(double alpha)
{
    const double disc = (1.0 + alpha) * (1.0 + alpha) + 4.0 * (1.0 - alpha * alpha);
    return (1.0 - alpha + std::sqrt(disc)) / 2.0;
}

Validation validate_params(double alpha, double gamma, DomainMode mode)
{
    if (!std::isfinite(alpha) || !std::isfinite(gamma))
    {
        return Validation::reject("non-finite step size");
    }
    switch (mode)
    {
        case DomainMode::Primary:
            return primary_test(alpha, gamma);

        case DomainMode::Extended:
        {
            if (!(alpha >= 0.0 && alpha < kGolden))
            {
                return Validation::reject("alpha=" + fmt(alpha)
                                          + " violates 0 <= alpha < "
                                          + fmt(kGolden));
            }
            const Validation direct = primary_test(alpha, gamma);
            if (direct)
            {
                return direct;
            }
            const Validation swapped = primary_test(gamma, alpha);
            if (swapped)
            {
                return swapped;
            }
            return Validation::reject(direct.reason + "; swapped: "
                                      + swapped.reason);
        }

        case DomainMode::NegativeAlpha:
        {
            const double edge = alpha * alpha - alpha - 1.0;
            if (alpha > -1.0 && alpha < 0.0)
            {
                if (gamma > 0.0 && gamma < edge)
                {
                    return Validation::accept();
                }
                return Validation::reject("gamma=" + fmt(gamma)
                                          + " violates 0 < gamma < "
                                          + fmt(edge));
            }
            if (alpha > 0.0 && alpha < 1.0)
            {
                if (gamma > edge && gamma < 0.0)
                {
                    return Validation::accept();
                }
                return Validation::reject("gamma=" + fmt(gamma) + " violates "
                                          + fmt(edge) + " < gamma < 0");
            }
            return Validation::reject("alpha=" + fmt(alpha)
                                      + " outside (-1, 0) and (0, 1)");
        }

        case DomainMode::HMY:
        {
            if (!(gamma > 0.0 && gamma < kGolden))
            {
                return Validation::reject("gamma=" + fmt(gamma)
                                          + " violates 0 < gamma < "
                                          + fmt(kGolden));
            }
            if (!(alpha > -1.0 && alpha < 1.0))
            {
                return Validation::reject("alpha=" + fmt(alpha)
                                          + " violates -1 < alpha < 1");
            }
            if (!(alpha + gamma > 0.0))
            {
                return Validation::reject("alpha + gamma must be positive");
            }
            const double cap = 1.0 + gamma - gamma * gamma;
            if (!(std::abs(alpha) < cap))
            {
                return Validation::reject("|alpha|=" + fmt(std::abs(alpha))
                                          + " violates |alpha| < " + fmt(cap));
            }
            return Validation::accept();
        }
    }
    return Validation::reject("unknown domain mode");
}

std::string to_string(DomainMode mode)
{
    switch (mode)
    {
        case DomainMode::Primary:
            return "primary";
        case DomainMode::Extended:
            return "extended";
        case DomainMode::NegativeAlpha:
            return "negalpha";
        case DomainMode::HMY:
            return "hmy";
    }
    return "unknown";
}

std::optional<DomainMode> parse_domain_mode(const std::string& s)
{
    if (s == "primary")
    {
        return DomainMode::Primary;
    }
    if (s == "extended")
    {
        return DomainMode::Extended;
    }
    if (s == "negalpha")
    {
        return DomainMode::NegativeAlpha;
    }
    if (s == "hmy")
    {
        return DomainMode::HMY;
    }
    return std::nullopt;
}

namespace
{
void require_step_sizes(double alpha, double gamma, double beta)
{
    if (alpha + gamma == 0.0)
    {
        throw std::invalid_argument("alpha + gamma must be nonzero");
    }
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("beta must be positive");
    }
}
}  // namespace

Matrix build_H(const Matrix& B, double alpha, double gamma, double beta)
{
    require_step_sizes(alpha, gamma, beta);
    const Index n2 = B.cols();
    const Index m = B.rows();
    const double s = alpha + gamma;
    Matrix H(n2 + m, n2 + m);
    H.topLeftCorner(n2, n2) = ((s - alpha * gamma) * beta / s) * (B.transpose() * B);
    H.topRightCorner(n2, m) = (-alpha / s) * B.transpose();
    H.bottomLeftCorner(m, n2) = (-alpha / s) * B;
    H.bottomRightCorner(m, m) = Matrix::Identity(m, m) / (s * beta);
    return H;
}

Matrix build_M(const Matrix& B, double alpha, double gamma, double beta)
{
    require_step_sizes(alpha, gamma, beta);
    const Index n2 = B.cols();
    const Index m = B.rows();
    Matrix M = Matrix::Zero(n2 + m, n2 + m);
    M.topLeftCorner(n2, n2).setIdentity();
    M.bottomLeftCorner(m, n2) = alpha * beta * B;
    M.bottomRightCorner(m, m) = (alpha + gamma) * beta * Matrix::Identity(m, m);
    return M;
}

double check_MtHM(const Matrix& B, double alpha, double gamma, double beta)
{
    const Matrix H = build_H(B, alpha, gamma, beta);
    const Matrix M = build_M(B, alpha, gamma, beta);
    const Index n2 = B.cols();
    const Index m = B.rows();
    Matrix expected = Matrix::Zero(n2 + m, n2 + m);
    expected.topLeftCorner(n2, n2) = (1.0 - alpha) * beta * (B.transpose() * B);
    expected.bottomRightCorner(m, m) =
        (alpha + gamma) * beta * Matrix::Identity(m, m);
    return (M.transpose() * H * M - expected).cwiseAbs().maxCoeff();
}

Matrix build_G(const Matrix& S,
               const Matrix& T,
               const Matrix& B,
               double alpha,
               double gamma,
               double beta)
{
    const Index n1 = S.rows();
    const Index n2 = B.cols();
    const Index m = B.rows();
    if (S.cols() != n1 || T.rows() != n2 || T.cols() != n2)
    {
        throw std::invalid_argument("build_G: dimension mismatch");
    }
    Matrix G = Matrix::Zero(n1 + n2 + m, n1 + n2 + m);
    G.topLeftCorner(n1, n1) = S;
    G.bottomRightCorner(n2 + m, n2 + m) = build_H(B, alpha, gamma, beta);
    G.block(n1, n1, n2, n2) += T;
    return G;
}

Matrix build_Ghat(const Matrix& sigma1,
                  const Matrix& sigma2,
                  const Matrix& S,
                  const Matrix& T,
                  const Matrix& B,
                  double alpha,
                  double gamma,
                  double beta)
{
    Matrix G = build_G(S, T, B, alpha, gamma, beta);
    const Index n1 = S.rows();
    const Index n2 = B.cols();
    if (sigma1.rows() != n1 || sigma1.cols() != n1 || sigma2.rows() != n2
        || sigma2.cols() != n2)
    {
        throw std::invalid_argument("build_Ghat: dimension mismatch");
    }
    G.topLeftCorner(n1, n1) += sigma1;
    G.block(n1, n1, n2, n2) += sigma2;
    return G;
}

double g_norm_sq(const Matrix& G, const Vector& dw)
{
    if (G.rows() != dw.size() || G.cols() != dw.size())
    {
        throw std::invalid_argument("g_norm_sq: dimension mismatch");
    }
    return dw.dot(G * dw);
}

double h_norm_sq(const LinearMap& B,
                 double alpha,
                 double gamma,
                 double beta,
                 const Vector& dy,
                 const Vector& dlambda)
{
    const double s = alpha + gamma;
    const Vector Bdy = B.apply(dy);
    return ((s - alpha * gamma) * beta * Bdy.squaredNorm()
            - 2.0 * alpha * Bdy.dot(dlambda) + dlambda.squaredNorm() / beta)
           / s;
}

double g_norm_sq_split(const SolverParams& params,
                       const LinearMap& B,
                       const Vector& dx,
                       const Vector& dy,
                       const Vector& dlambda)
{
    return params.S.quad(dx) + params.T.quad(dy)
           + h_norm_sq(B, params.alpha, params.gamma, params.beta, dy, dlambda);
}

double ghat_norm_sq_split(const SplitProblem& problem,
                          const SolverParams& params,
                          const Vector& dx,
                          const Vector& dy,
                          const Vector& dlambda)
{
    return problem.sigma1.quad(dx) + problem.sigma2.quad(dy)
           + g_norm_sq_split(params, problem.B, dx, dy, dlambda);
}

std::pair<double, double> delta_interval(double alpha, double gamma)
{
    if (!(gamma > 1.0) || !(alpha < 1.0))
    {
        throw std::invalid_argument("delta_interval: needs gamma > 1, alpha < 1");
    }
    const double lo = (gamma - 1.0) / (1.0 - alpha);
    const double hi = (1.0 + alpha) / (gamma - 1.0) - (1.0 + alpha) / (1.0 - alpha);
    return {lo, hi};
}

ContractionConstants contraction_constants(double alpha,
                                           double gamma,
                                           std::optional<double> delta)
{
    const Validation v = validate_params(alpha, gamma, DomainMode::Primary);
    if (!v)
    {
        throw std::invalid_argument("contraction_constants: " + v.reason);
    }
    ContractionConstants c;
    if (gamma < 1.0)
    {
        c.which = ContractionCase::GammaBelowOne;
        const double s = alpha + gamma;
        c.tau = (1.0 - std::sqrt(1.0 - s * (1.0 - gamma))) / s;
    }
    else if (gamma == 1.0)
    {
        c.which = ContractionCase::GammaOne;
        c.eta = (1.0 - alpha) / (1.0 + alpha);
        c.tau = c.eta;
    }
    else
    {
        c.which = ContractionCase::GammaAboveOne;
        const auto [lo, hi] = delta_interval(alpha, gamma);
        const double d = delta.value_or(0.5 * (lo + hi));
        if (!(d > lo && d < hi))
        {
            throw std::invalid_argument("delta=" + fmt(d) + " outside ("
                                        + fmt(lo) + ", " + fmt(hi) + ")");
        }
        const double ratio = (1.0 - alpha) / (1.0 + alpha);
        c.delta = d;
        c.rho = d * (gamma - 1.0) * ratio;
        c.eta = ratio;
        const double first = 1.0 - lo / d;
        const double second = (gamma - 1.0) / (alpha + gamma) * (hi - d);
        c.tau = ratio * std::min(first, second);
    }
    c.tau_hat = std::min(0.5, c.tau);
    return c;
}

double c0_constant(double alpha, double gamma)
{
    const double s = alpha + gamma;
    if (!(s > 0.0))
    {
        throw std::invalid_argument("c0_constant: alpha + gamma must be positive");
    }
    return (2.0 * s - alpha * gamma - alpha * std::sqrt(gamma * gamma + 4.0 * s))
           / (2.0 * s);
}

double c_alpha_gamma(double alpha, double gamma)
{
    if (alpha == 1.0)
    {
        throw std::invalid_argument("c_alpha_gamma: alpha = 1 is not allowed");
    }
    return c0_constant(alpha, gamma) / (1.0 - alpha);
}

}  // namespace sprsm
