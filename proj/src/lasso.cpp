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

#include "sprsm/lasso.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "sprsm/rng.hpp"

namespace sprsm::lasso
{
namespace
{
// Independent RNG streams of an instance.
enum Stream : std::uint64_t
{
    kMask = 1,
    kSignal = 2,
    kDesign = 3,
    kNoise = 4
};

double gram_lambda_max(const Matrix& gram)
{
    const PowerIterationResult pi = power_iteration(
        [&gram](const Vector& v) -> Vector { return gram * v; }, gram.rows(),
        1e-10, 10000);
    if (!pi.converged)
    {
        throw std::runtime_error(
            "spectral_factor: power iteration did not converge in 10000 steps");
    }
    return pi.eigenvalue;
}

Matrix smaller_gram(const Matrix& A)
{
    if (A.rows() <= A.cols())
    {
        Matrix g(A.rows(), A.rows());
        g.setZero();
        g.selfadjointView<Eigen::Lower>().rankUpdate(A);
        return g.selfadjointView<Eigen::Lower>();
    }
    Matrix g(A.cols(), A.cols());
    g.setZero();
    g.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    return g.selfadjointView<Eigen::Lower>();
}

double factor_from_lambda(double lambda_max, double beta, ProxKind kind)
{
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("spectral_factor: beta must be positive");
    }
    switch (kind)
    {
        case ProxKind::Zero:
            return 0.0;
        case ProxKind::SemiDef:
            return 1.01 * (1.0 + lambda_max / (2.0 * beta));
        case ProxKind::Indef:
            return 1.0 + lambda_max / beta;
    }
    return 0.0;
}

bool same_prox(const ProxMatrix& a, const ProxMatrix& b)
{
    if (a.kind() != b.kind())
    {
        return false;
    }
    switch (a.kind())
    {
        case ProxMatrix::Kind::Zero:
            return true;
        case ProxMatrix::Kind::Dense:
            return a.data() == b.data();
        case ProxMatrix::Kind::ShiftedGram:
            return a.data() == b.data() && a.shift() == b.shift()
                   && a.gram_coeff() == b.gram_coeff();
    }
    return false;
}

}  // namespace

std::string serialize_key(const InstanceKey& key)
{
    nlohmann::json j;
    j["n"] = key.n;
    j["p"] = key.p;
    j["seed"] = key.seed;
    return j.dump();
}

InstanceKey parse_key(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    InstanceKey key;
    key.n = j.at("n").get<int>();
    key.p = j.at("p").get<double>();
    key.seed = j.at("seed").get<std::uint64_t>();
    return key;
}

Vector planted_signal(int n, double p, std::uint64_t seed)
{
    if (n < 1)
    {
        throw std::invalid_argument("planted_signal: n must be positive");
    }
    if (!(p > 0.0 && p <= 1.0))
    {
        throw std::invalid_argument("planted_signal: p must lie in (0, 1]");
    }
    const CounterRng mask(seed, kMask);
    const CounterRng signal(seed, kSignal);
    Vector x = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
    {
        const auto u = static_cast<std::uint64_t>(i);
        if (mask.uniform(u) < p)
        {
            x(i) = signal.normal(u);
        }
    }
    return x;
}

LassoInstance instance_from_data(Matrix A, Vector b, double mu)
{
    if (A.rows() != b.size() || A.size() == 0)
    {
        throw std::invalid_argument("instance_from_data: A and b disagree");
    }
    if (!(mu >= 0.0))
    {
        throw std::invalid_argument("instance_from_data: mu must be nonnegative");
    }
    LassoInstance inst;
    inst.n = static_cast<int>(A.cols());
    inst.m = static_cast<int>(A.rows());
    inst.b = std::move(b);
    inst.Atb = A.transpose() * inst.b;
    inst.mu = mu;
    inst.x_true = Vector::Zero(A.cols());
    inst.gram = std::make_shared<const Matrix>(smaller_gram(A));
    inst.A = std::make_shared<const Matrix>(std::move(A));
    return inst;
}

LassoInstance generate_instance(int n, double p, std::uint64_t seed)
{
    if (n < 2 || n % 2 != 0)
    {
        throw std::invalid_argument("generate_instance: n must be even and >= 2");
    }
    if (!(p > 0.0 && p <= 1.0))
    {
        throw std::invalid_argument("generate_instance: p must lie in (0, 1]");
    }
    const Index m = n / 2;
    const CounterRng design(seed, kDesign);
    const CounterRng noise(seed, kNoise);

    const Vector x_true = planted_signal(n, p, seed);
    Matrix A(m, n);
    for (Index j = 0; j < n; ++j)
    {
        for (Index i = 0; i < m; ++i)
        {
            A(i, j) = design.normal(static_cast<std::uint64_t>(j * m + i));
        }
        A.col(j) /= A.col(j).norm();
    }

    Vector e(m);
    for (Index i = 0; i < m; ++i)
    {
        e(i) = noise.normal(static_cast<std::uint64_t>(i));
    }
    Vector b = A * x_true + std::sqrt(0.001) * e;
    const double mu = 0.1 * (A.transpose() * b).cwiseAbs().maxCoeff();
    LassoInstance inst = instance_from_data(std::move(A), std::move(b), mu);
    inst.p = p;
    inst.seed = seed;
    inst.x_true = x_true;
    return inst;
}

Vector shrinkage(const Vector& y, double nu)
{
    if (nu < 0.0)
    {
        throw std::invalid_argument("shrinkage: nu must be nonnegative");
    }
    Vector out(y.size());
    for (Index i = 0; i < y.size(); ++i)
    {
        const double mag = std::max(std::abs(y(i)) - nu, 0.0);
        out(i) = y(i) >= 0.0 ? mag : -mag;
    }
    return out;
}

std::string to_string(ProxKind kind)
{
    switch (kind)
    {
        case ProxKind::Zero:
            return "zero";
        case ProxKind::SemiDef:
            return "semidef";
        case ProxKind::Indef:
            return "indef";
    }
    return "unknown";
}

double spectral_factor(const Matrix& A, double beta, ProxKind kind)
{
    if (kind == ProxKind::Zero)
    {
        return factor_from_lambda(0.0, beta, kind);
    }
    return factor_from_lambda(gram_lambda_max(smaller_gram(A)), beta, kind);
}

double spectral_factor(const LassoInstance& inst, double beta, ProxKind kind)
{
    if (kind == ProxKind::Zero)
    {
        return factor_from_lambda(0.0, beta, kind);
    }
    return factor_from_lambda(gram_lambda_max(*inst.gram), beta, kind);
}

ProxSpec make_prox_spec(const LassoInstance& inst, double beta, ProxKind kind)
{
    ProxSpec spec;
    spec.kind = kind;
    spec.xi = spectral_factor(inst, beta, kind);
    switch (kind)
    {
        case ProxKind::Zero:
            spec.S = ProxMatrix::zero();
            break;
        case ProxKind::SemiDef:
            spec.S = ProxMatrix::shifted_gram(beta * (spec.xi - 1.0), -0.5, inst.A);
            break;
        case ProxKind::Indef:
            spec.S = ProxMatrix::shifted_gram(beta * (spec.xi - 1.0), -1.0, inst.A);
            break;
    }
    return spec;
}

XUpdateSolver::XUpdateSolver(std::shared_ptr<const LassoInstance> inst,
                             double beta,
                             ProxMatrix S)
    : inst_(std::move(inst)), beta_(beta), S_(std::move(S))
{
    if (!inst_)
    {
        throw std::invalid_argument("XUpdateSolver: null instance");
    }
    if (!(beta_ > 0.0))
    {
        throw std::invalid_argument("XUpdateSolver: beta must be positive");
    }
    const Matrix& A = *inst_->A;
    const Index n = A.cols();
    const Index m = A.rows();

    bool structured = false;
    if (S_.is_zero())
    {
        structured = true;
        gram_c_ = 1.0;
        diag_d_ = beta_;
    }
    else if (S_.kind() == ProxMatrix::Kind::ShiftedGram && S_.data() == inst_->A)
    {
        structured = true;
        gram_c_ = 1.0 + S_.gram_coeff();
        diag_d_ = beta_ + S_.shift();
    }
    else if (S_.dim() != n)
    {
        throw std::invalid_argument("XUpdateSolver: S has wrong dimension");
    }

    if (structured && gram_c_ == 0.0)
    {
        if (!(diag_d_ > 0.0))
        {
            throw std::runtime_error("XUpdateSolver: singular system");
        }
        path_ = Path::Diagonal;
        return;
    }
    if (structured && gram_c_ > 0.0 && diag_d_ > 0.0)
    {
        if (m <= n)
        {
            path_ = Path::Woodbury;
            Matrix K = gram_c_ * (*inst_->gram);
            K.diagonal().array() += diag_d_;
            llt_.compute(K);
        }
        else
        {
            path_ = Path::Direct;
            Matrix K = gram_c_ * (*inst_->gram);
            K.diagonal().array() += diag_d_;
            llt_.compute(K);
        }
        if (llt_.info() != Eigen::Success)
        {
            throw std::runtime_error("XUpdateSolver: factorization failed");
        }
        return;
    }

    path_ = Path::Direct;
    Matrix K = A.transpose() * A;
    K.diagonal().array() += beta_;
    K += S_.to_dense(n);
    llt_.compute(K);
    if (llt_.info() != Eigen::Success)
    {
        use_ldlt_ = true;
        ldlt_.compute(K);
        if (ldlt_.info() != Eigen::Success || ldlt_.rcond() < 1e-14)
        {
            throw std::runtime_error("XUpdateSolver: singular system");
        }
    }
}

Vector XUpdateSolver::apply_inverse(const Vector& rhs) const
{
    switch (path_)
    {
        case Path::Diagonal:
            return rhs / diag_d_;
        case Path::Woodbury:
        {
            const Matrix& A = *inst_->A;
            const Vector inner = llt_.solve(A * rhs);
            return (rhs - gram_c_ * (A.transpose() * inner)) / diag_d_;
        }
        case Path::Direct:
            return use_ldlt_ ? Vector(ldlt_.solve(rhs)) : Vector(llt_.solve(rhs));
    }
    return {};
}

Vector XUpdateSolver::solve(const Vector& y,
                            const Vector& lambda,
                            const Vector& x_prev) const
{
    Vector rhs = inst_->Atb + beta_ * y + lambda;
    if (!S_.is_zero())
    {
        rhs += S_.apply(x_prev);
    }
    return apply_inverse(rhs);
}

Vector lasso_x_update(const std::shared_ptr<const LassoInstance>& inst,
                      double beta,
                      const ProxSpec& spec,
                      const Vector& y,
                      const Vector& lambda,
                      const Vector& x_prev)
{
    return XUpdateSolver(inst, beta, spec.S).solve(y, lambda, x_prev);
}

Vector lasso_y_update(const Vector& x_plus,
                      const Vector& lambda_half,
                      double beta,
                      double mu)
{
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("lasso_y_update: beta must be positive");
    }
    return shrinkage(x_plus - lambda_half / beta, mu / beta);
}

double lasso_objective(const LassoInstance& inst, const Vector& x, const Vector& y)
{
    return 0.5 * ((*inst.A) * x - inst.b).squaredNorm() + inst.mu * y.lpNorm<1>();
}

namespace
{
struct SolverCache
{
    std::mutex mutex;
    std::vector<std::shared_ptr<const XUpdateSolver>> solvers;

    std::shared_ptr<const XUpdateSolver> get(
        const std::shared_ptr<const LassoInstance>& inst,
        double beta,
        const ProxMatrix& S)
    {
        std::lock_guard<std::mutex> lock(mutex);
        for (const auto& s : solvers)
        {
            if (s->beta() == beta && same_prox(s->S(), S))
            {
                return s;
            }
        }
        auto made = std::make_shared<const XUpdateSolver>(inst, beta, S);
        solvers.push_back(made);
        return made;
    }
};
}  // namespace

SplitProblem make_split_problem(std::shared_ptr<const LassoInstance> inst,
                                bool supply_sigma1)
{
    if (!inst)
    {
        throw std::invalid_argument("make_split_problem: null instance");
    }
    const Index n = inst->n;
    SplitProblem prob;
    prob.A = LinearMap::scaled_identity(n, 1.0);
    prob.B = LinearMap::scaled_identity(n, -1.0);
    prob.b = Vector::Zero(n);

    auto cache = std::make_shared<SolverCache>();
    prob.x_subproblem = [inst, cache](const Vector& y, const Vector& lambda,
                                      double beta, const ProxMatrix& S,
                                      const Vector& x_prev) {
        return cache->get(inst, beta, S)->solve(y, lambda, x_prev);
    };
    const double mu = inst->mu;
    prob.y_subproblem = [mu](const Vector& x, const Vector& lambda_half,
                             double beta, const ProxMatrix& T,
                             const Vector&) {
        if (!T.is_zero())
        {
            throw std::invalid_argument("LASSO y-update supports T = 0 only");
        }
        return lasso_y_update(x, lambda_half, beta, mu);
    };
    prob.objective = [inst](const Vector& x, const Vector& y) {
        return lasso_objective(*inst, x, y);
    };
    prob.subgradient_x = [inst](const Vector& x) -> Vector {
        return inst->A->transpose() * ((*inst->A) * x - inst->b);
    };
    prob.subgradient_y = [mu](const Vector& y) -> Vector {
        return y.unaryExpr([mu](double v) {
            return v > 0.0 ? mu : (v < 0.0 ? -mu : 0.0);
        });
    };
    if (supply_sigma1)
    {
        prob.sigma1 = ProxMatrix::shifted_gram(0.0, 1.0, inst->A);
    }
    return prob;
}

}  // namespace sprsm::lasso
