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

#include "sprsm/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "sprsm/rng.hpp"

namespace sprsm
{
LinearMap LinearMap::dense(Matrix m)
{
    LinearMap map;
    map.rows_ = m.rows();
    map.cols_ = m.cols();
    map.dense_ = std::make_shared<const Matrix>(std::move(m));
    return map;
}

LinearMap LinearMap::scaled_identity(Index n, double scale)
{
    LinearMap map;
    map.rows_ = n;
    map.cols_ = n;
    map.scale_ = scale;
    return map;
}

Vector LinearMap::apply(const Vector& v) const
{
    if (v.size() != cols_)
    {
        throw std::invalid_argument("LinearMap::apply: dimension mismatch");
    }
    if (dense_)
    {
        return (*dense_) * v;
    }
    return scale_ * v;
}

Vector LinearMap::apply_transpose(const Vector& v) const
{
    if (v.size() != rows_)
    {
        throw std::invalid_argument(
            "LinearMap::apply_transpose: dimension mismatch");
    }
    if (dense_)
    {
        return dense_->transpose() * v;
    }
    return scale_ * v;
}

Matrix LinearMap::to_dense() const
{
    if (dense_)
    {
        return *dense_;
    }
    return scale_ * Matrix::Identity(rows_, cols_);
}

ProxMatrix ProxMatrix::dense(Matrix m)
{
    if (m.rows() != m.cols())
    {
        throw std::invalid_argument("ProxMatrix::dense: matrix is not square");
    }
    ProxMatrix q;
    q.kind_ = Kind::Dense;
    q.data_ = std::make_shared<const Matrix>(std::move(m));
    return q;
}

ProxMatrix ProxMatrix::shifted_gram(double shift,
                                    double gram_coeff,
                                    std::shared_ptr<const Matrix> data)
{
    if (!data)
    {
        throw std::invalid_argument("ProxMatrix::shifted_gram: null data");
    }
    ProxMatrix q;
    q.kind_ = Kind::ShiftedGram;
    q.shift_ = shift;
    q.gram_coeff_ = gram_coeff;
    q.data_ = std::move(data);
    return q;
}

Index ProxMatrix::dim() const
{
    switch (kind_)
    {
        case Kind::Zero:
            return -1;
        case Kind::Dense:
            return data_->rows();
        case Kind::ShiftedGram:
            return data_->cols();
    }
    return -1;
}

Vector ProxMatrix::apply(const Vector& v) const
{
    switch (kind_)
    {
        case Kind::Zero:
            return Vector::Zero(v.size());
        case Kind::Dense:
            return (*data_) * v;
        case Kind::ShiftedGram:
        {
            Vector out = shift_ * v;
            if (gram_coeff_ != 0.0)
            {
                out.noalias() +=
                    gram_coeff_ * (data_->transpose() * ((*data_) * v));
            }
            return out;
        }
    }
    return {};
}

double ProxMatrix::quad(const Vector& v) const
{
    switch (kind_)
    {
        case Kind::Zero:
            return 0.0;
        case Kind::Dense:
            return v.dot((*data_) * v);
        case Kind::ShiftedGram:
            return shift_ * v.squaredNorm()
                   + gram_coeff_ * ((*data_) * v).squaredNorm();
    }
    return 0.0;
}

double ProxMatrix::seminorm(const Vector& v) const
{
    return std::sqrt(std::max(quad(v), 0.0));
}

Matrix ProxMatrix::to_dense(Index n) const
{
    switch (kind_)
    {
        case Kind::Zero:
            return Matrix::Zero(n, n);
        case Kind::Dense:
            break;
        case Kind::ShiftedGram:
        {
            if (data_->cols() != n)
            {
                break;
            }
            Matrix out = gram_coeff_ * (data_->transpose() * (*data_));
            out.diagonal().array() += shift_;
            return out;
        }
    }
    if (kind_ == Kind::Dense && data_->rows() == n)
    {
        return *data_;
    }
    throw std::invalid_argument("ProxMatrix::to_dense: dimension mismatch");
}

double symmetric_min_eigenvalue(const Matrix& x)
{
    const Matrix sym = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double symmetric_max_eigenvalue(const Matrix& x)
{
    const Matrix sym = 0.5 * (x + x.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(sym.rows() - 1);
}

double asymmetry(const Matrix& x)
{
    if (x.size() == 0)
    {
        return 0.0;
    }
    return (x - x.transpose()).cwiseAbs().maxCoeff();
}

PowerIterationResult power_iteration(const SymmetricOperator& op,
                                     Index dim,
                                     double rel_tol,
                                     int max_iters,
                                     std::uint64_t seed)
{
    if (dim <= 0)
    {
        throw std::invalid_argument("power_iteration: empty operator");
    }
    const CounterRng rng(seed, 0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i)
    {
        v(i) = rng.normal(static_cast<std::uint64_t>(i));
    }
    v.normalize();

    PowerIterationResult result;
    double previous = 0.0;
    for (int it = 1; it <= max_iters; ++it)
    {
        Vector w = op(v);
        const double rayleigh = v.dot(w);
        const double norm = w.norm();
        result.iterations = it;
        result.eigenvalue = rayleigh;
        if (norm == 0.0)
        {
            // v in the null space; the operator is zero on the start vector
            result.eigenvector = v;
            result.converged = true;
            return result;
        }
        v = w / norm;
        if (it > 1 && std::abs(rayleigh - previous) <= rel_tol * std::abs(rayleigh))
        {
            result.converged = true;
            break;
        }
        previous = rayleigh;
    }
    result.eigenvector = v;
    return result;
}

}  // namespace sprsm
