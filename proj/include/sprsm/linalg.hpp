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
#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace sprsm
{
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A coupling matrix of the linear constraint. Identity-like couplings
/// (the LASSO splitting uses A = I, B = -I) are kept implicit so that the
/// iteration does not pay for dense products with them.
class LinearMap
{
   public:
    LinearMap() = default;

    static LinearMap dense(Matrix m);
    static LinearMap scaled_identity(Index n, double scale);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    bool is_scaled_identity() const { return !dense_; }
    double scale() const { return scale_; }

    Vector apply(const Vector& v) const;
    Vector apply_transpose(const Vector& v) const;
    Matrix to_dense() const;

   private:
    std::shared_ptr<const Matrix> dense_;
    double scale_ = 1.0;
    Index rows_ = 0;
    Index cols_ = 0;
};

/// Symmetric matrix used for the proximal terms S and T and for the
/// strong-convexity moduli. Three representations:
///   - zero (any dimension),
///   - an explicit dense matrix,
///   - shift * I + gram_coeff * D^T D for a data matrix D held by pointer.
/// The last one covers every proximal matrix the LASSO experiments use and
/// never materializes an n x n matrix unless asked to.
class ProxMatrix
{
   public:
    enum class Kind
    {
        Zero,
        Dense,
        ShiftedGram
    };

    ProxMatrix() = default;

    static ProxMatrix zero() { return {}; }
    static ProxMatrix dense(Matrix m);
    static ProxMatrix shifted_gram(double shift,
                                   double gram_coeff,
                                   std::shared_ptr<const Matrix> data);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    double shift() const { return shift_; }
    double gram_coeff() const { return gram_coeff_; }
    const std::shared_ptr<const Matrix>& data() const { return data_; }

    /// Dimension, or -1 for the dimensionless zero.
    Index dim() const;

    Vector apply(const Vector& v) const;
    /// v^T Q v; may be negative for indefinite Q.
    double quad(const Vector& v) const;
    /// sqrt(max(v^T Q v, 0)).
    double seminorm(const Vector& v) const;
    Matrix to_dense(Index n) const;

   private:
    Kind kind_ = Kind::Zero;
    std::shared_ptr<const Matrix> data_;
    double shift_ = 0.0;
    double gram_coeff_ = 0.0;
};

/// Smallest eigenvalue of (X + X^T)/2.
double symmetric_min_eigenvalue(const Matrix& x);
/// Largest eigenvalue of (X + X^T)/2.
double symmetric_max_eigenvalue(const Matrix& x);
/// Largest entrywise |X - X^T|.
double asymmetry(const Matrix& x);

struct PowerIterationResult
{
    double eigenvalue = 0.0;
    Vector eigenvector;
    int iterations = 0;
    bool converged = false;
};

using SymmetricOperator = std::function<Vector(const Vector&)>;

/// Power iteration for the dominant eigenvalue of a symmetric positive
/// semidefinite operator. Stops once successive Rayleigh quotients agree to
/// `rel_tol` relative. The start vector is drawn from a seeded generator.
PowerIterationResult power_iteration(const SymmetricOperator& op,
                                     Index dim,
                                     double rel_tol = 1e-10,
                                     int max_iters = 10000,
                                     std::uint64_t seed = 0x5eed);

}  // namespace sprsm
