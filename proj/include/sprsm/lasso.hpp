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

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sprsm/core_model.hpp"

namespace sprsm::lasso
{
/// min 1/2 |A x - b|^2 + mu |x|_1 with a planted sparse solution.
struct LassoInstance
{
    int n = 0;
    int m = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    /// m x n, unit-norm columns.
    std::shared_ptr<const Matrix> A;
    Vector b;
    double mu = 0.0;
    Vector x_true;
    /// A^T b, reused by every x-update.
    Vector Atb;
    /// Gram matrix of the smaller side: A A^T when m <= n, else A^T A.
    std::shared_ptr<const Matrix> gram;
};

/// What is needed to regenerate an instance bit-for-bit.
struct InstanceKey
{
    int n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const InstanceKey&) const = default;
};

std::string serialize_key(const InstanceKey& key);
InstanceKey parse_key(const std::string& text);

/// m = n/2, x_true = Bernoulli(p) mask times standard normals,
/// A = standard normal with columns scaled to unit norm,
/// b = A x_true + sqrt(1e-3) * noise, mu = 0.1 |A^T b|_inf.
/// Throws std::invalid_argument for odd or small n or p outside (0, 1].
LassoInstance generate_instance(int n, double p, std::uint64_t seed);
/// The planted solution alone: Bernoulli(p) mask times standard normals.
Vector planted_signal(int n, double p, std::uint64_t seed);

/// Wraps given data; x_true is zero and (p, seed) are unset.
LassoInstance instance_from_data(Matrix A, Vector b, double mu);

inline LassoInstance generate_instance(const InstanceKey& key)
{
    return generate_instance(key.n, key.p, key.seed);
}

/// sgn(y_i) max(|y_i| - nu, 0) with sgn(0) = +1.
Vector shrinkage(const Vector& y, double nu);

enum class ProxKind
{
    Zero,
    SemiDef,
    Indef
};

std::string to_string(ProxKind kind);

struct ProxSpec
{
    ProxKind kind = ProxKind::Zero;
    double xi = 0.0;
    ProxMatrix S;
};

/// SemiDef: 1.01 * lambda_max(I + A^T A / (2 beta)).
/// Indef:   lambda_max(I + A^T A / beta).
/// Zero:    0 (no factor needed).
/// lambda_max comes from power iteration to 1e-10 relative; throws
/// std::runtime_error if that takes more than 1e4 steps.
double spectral_factor(const Matrix& A, double beta, ProxKind kind);
double spectral_factor(const LassoInstance& inst, double beta, ProxKind kind);

/// SemiDef: S = beta (xi - 1) I - A^T A / 2.  Indef: S = beta (xi - 1) I - A^T A.
ProxSpec make_prox_spec(const LassoInstance& inst, double beta, ProxKind kind);

/// Solves (A^T A + beta I + S) x = A^T b + beta y + lambda + S x_prev.
/// The matrix is factorized once at construction; S must be zero, a
/// shifted Gram of the instance's A, or dense.
class XUpdateSolver
{
   public:
    XUpdateSolver(std::shared_ptr<const LassoInstance> inst,
                  double beta,
                  ProxMatrix S);

    Vector solve(const Vector& y, const Vector& lambda, const Vector& x_prev) const;
    /// (A^T A + beta I + S)^{-1} rhs.
    Vector apply_inverse(const Vector& rhs) const;

    double beta() const { return beta_; }
    const ProxMatrix& S() const { return S_; }

   private:
    enum class Path
    {
        Diagonal,  // gram_coeff == 0
        Woodbury,  // m < n
        Direct
    };

    std::shared_ptr<const LassoInstance> inst_;
    double beta_;
    ProxMatrix S_;
    Path path_ = Path::Direct;
    /// The system is gram_c * A^T A + diag_d * I on the ShiftedGram paths.
    double gram_c_ = 1.0;
    double diag_d_ = 1.0;
    Eigen::LLT<Matrix> llt_;
    Eigen::LDLT<Matrix> ldlt_;
    bool use_ldlt_ = false;
};

Vector lasso_x_update(const std::shared_ptr<const LassoInstance>& inst,
                      double beta,
                      const ProxSpec& spec,
                      const Vector& y,
                      const Vector& lambda,
                      const Vector& x_prev);

/// S_{mu/beta}(x+ - lambda_half / beta).
Vector lasso_y_update(const Vector& x_plus,
                      const Vector& lambda_half,
                      double beta,
                      double mu);

/// 1/2 |A x - b|^2 + mu |y|_1.
double lasso_objective(const LassoInstance& inst, const Vector& x, const Vector& y);

/// The splitting x - y = 0 (A = I, B = -I, b = 0) with closed-form
/// oracles. The x-oracle factorizes once per distinct (beta, S) and caches
/// the result, so one problem can be shared by concurrent solves.
/// With supply_sigma1, theta1's modulus A^T A is attached.
SplitProblem make_split_problem(std::shared_ptr<const LassoInstance> inst,
                                bool supply_sigma1 = false);

}  // namespace sprsm::lasso
