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

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "sprsm/lasso.hpp"
#include "sprsm/solver.hpp"
#include "test_support.hpp"

using namespace sprsm;
using namespace sprsm::lasso;
using testing_support::random_matrix;
using testing_support::random_vector;

namespace
{
std::shared_ptr<const LassoInstance> shared(LassoInstance inst)
{
    return std::make_shared<const LassoInstance>(std::move(inst));
}

double rel_err(const Vector& a, const Vector& b)
{
    return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}
}  // namespace

TEST_CASE("generated instance at n = 2000")
{
    const LassoInstance inst = generate_instance(2000, 0.2, 1);
    const Matrix& A = *inst.A;
    CHECK(inst.m == 1000);
    CHECK(A.rows() == 1000);
    CHECK(A.cols() == 2000);
    CHECK((A.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(inst.mu == 0.1 * (A.transpose() * inst.b).cwiseAbs().maxCoeff());
    CHECK((inst.Atb - A.transpose() * inst.b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(inst.gram->rows() == 1000);
    // noise has variance 1e-3 per entry
    const double noise = (inst.b - A * inst.x_true).squaredNorm() / 1000;
    CHECK(noise == doctest::Approx(1e-3).epsilon(0.15));

    const LassoInstance again = generate_instance(2000, 0.2, 1);
    CHECK(*again.A == A);
    CHECK(again.b == inst.b);
    CHECK(again.x_true == inst.x_true);
    const LassoInstance other = generate_instance(2000, 0.2, 2);
    CHECK(other.b != inst.b);
}

TEST_CASE("planted signal density")
{
    int outside = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed)
    {
        const Vector x = planted_signal(2000, 0.2, seed);
        const double density = static_cast<double>((x.array() != 0.0).count()) / 2000;
        if (density < 0.15 || density > 0.25)
            ++outside;
    }
    CHECK(outside == 0);
    CHECK((planted_signal(500, 1.0, 3).array() != 0.0).all());
    CHECK(planted_signal(40, 0.3, 9) == generate_instance(40, 0.3, 9).x_true);
}

TEST_CASE("invalid generation arguments")
{
    CHECK_THROWS_AS(generate_instance(201, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_instance(0, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_instance(200, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_instance(200, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(planted_signal(10, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(instance_from_data(Matrix::Zero(3, 2), Vector::Zero(2), 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(instance_from_data(Matrix::Zero(3, 2), Vector::Zero(3), -1.0),
                    std::invalid_argument);
}

TEST_CASE("instance keys round-trip")
{
    const InstanceKey key{400, 0.3, 12345678901234ULL};
    const InstanceKey back = parse_key(serialize_key(key));
    CHECK(back == key);
    const LassoInstance a = generate_instance(back);
    const LassoInstance b = generate_instance(400, 0.3, 12345678901234ULL);
    CHECK(*a.A == *b.A);
    CHECK(a.b == b.b);
}

TEST_CASE("shrinkage")
{
    Vector y(5);
    y << 3.0, -3.0, 0.5, -0.5, 0.0;
    Vector expect(5);
    expect << 2.0, -2.0, 0.0, 0.0, 0.0;
    CHECK(shrinkage(y, 1.0) == expect);
    CHECK(shrinkage(y, 0.0) == y);
    CHECK_THROWS_AS(shrinkage(y, -1.0), std::invalid_argument);

    Vector x(2), lh(2);
    x << 1.0, -1.0;
    lh << -2.0, 0.0;
    // shrink(x - lh / beta, mu / beta) with beta = 2, mu = 1
    Vector yu(2);
    yu << 1.5, -0.5;
    CHECK((lasso_y_update(x, lh, 2.0, 1.0) - yu).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("spectral factors")
{
    const Matrix one = Matrix::Identity(1, 1);
    CHECK(spectral_factor(one, 2.0, ProxKind::Indef) == doctest::Approx(1.5));
    CHECK(spectral_factor(one, 2.0, ProxKind::SemiDef) == doctest::Approx(1.01 * 1.25));
    CHECK(spectral_factor(one, 2.0, ProxKind::Zero) == 0.0);
    CHECK_THROWS_AS(spectral_factor(one, 0.0, ProxKind::Indef), std::invalid_argument);

    std::mt19937_64 gen(41);
    for (auto [r, c] : {std::pair{50, 80}, {80, 50}})
    {
        const Matrix A = random_matrix(gen, r, c);
        const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(A.transpose() * A)
                                .eigenvalues()
                                .maxCoeff();
        const double ind = spectral_factor(A, 1.0, ProxKind::Indef);
        // stopping on successive quotients leaves an error set by the eigengap
        CHECK(ind == doctest::Approx(1 + lmax).epsilon(1e-6));
        const double sd = spectral_factor(A, 1.0, ProxKind::SemiDef);
        CHECK(sd == doctest::Approx(1.01 * (1 + lmax / 2)).epsilon(1e-6));
        CHECK(sd >= 1.01);
    }
}

TEST_CASE("proximal matrices")
{
    auto inst = shared(generate_instance(100, 0.2, 7));
    const Matrix& A = *inst->A;
    const Matrix AtA = A.transpose() * A;
    const double beta = 1.3;

    const ProxSpec semi = make_prox_spec(*inst, beta, ProxKind::SemiDef);
    const Matrix Ss = semi.S.to_dense(100);
    CHECK(symmetric_min_eigenvalue(Ss) >= -1e-9);
    CHECK((Ss + 0.5 * AtA - beta * (semi.xi - 1) * Matrix::Identity(100, 100))
              .cwiseAbs()
              .maxCoeff()
          < 1e-10);

    const ProxSpec ind = make_prox_spec(*inst, beta, ProxKind::Indef);
    const Matrix Si = ind.S.to_dense(100);
    CHECK((Si + AtA - beta * (ind.xi - 1) * Matrix::Identity(100, 100)).cwiseAbs().maxCoeff()
          < 1e-10);

    const ProxSpec zero = make_prox_spec(*inst, beta, ProxKind::Zero);
    CHECK(zero.S.is_zero());
    CHECK(zero.xi == 0.0);
    CHECK(to_string(ProxKind::Indef) == "indef");
}

TEST_CASE("x-update")
{
    auto inst = shared(generate_instance(80, 0.2, 8));
    const Matrix& A = *inst->A;
    std::mt19937_64 gen(42);
    const double beta = 0.9;

    SUBCASE("indef system is a multiple of the identity")
    {
        const ProxSpec spec = make_prox_spec(*inst, beta, ProxKind::Indef);
        const Vector y = random_vector(gen, 80), lam = random_vector(gen, 80),
                     xp = random_vector(gen, 80);
        const Vector Sxp = beta * (spec.xi - 1) * xp - A.transpose() * (A * xp);
        const Vector expect = (inst->Atb + beta * y + lam + Sxp) / (beta * spec.xi);
        CHECK(rel_err(lasso_x_update(inst, beta, spec, y, lam, xp), expect) < 1e-12);
    }
    SUBCASE("identity data")
    {
        const Vector b = random_vector(gen, 6);
        auto toy = shared(instance_from_data(Matrix::Identity(6, 6), b, 0.1));
        const Vector y = random_vector(gen, 6), lam = random_vector(gen, 6);
        const ProxSpec spec = make_prox_spec(*toy, 2.0, ProxKind::Zero);
        CHECK(rel_err(lasso_x_update(toy, 2.0, spec, y, lam, y), (b + 2.0 * y + lam) / 3.0)
              < 1e-14);
    }
    SUBCASE("a stationary x is reproduced by every proximal choice")
    {
        const Vector x = random_vector(gen, 80);
        const Vector lam = A.transpose() * (A * x - inst->b);
        for (ProxKind kind : {ProxKind::Zero, ProxKind::SemiDef, ProxKind::Indef})
        {
            const ProxSpec spec = make_prox_spec(*inst, beta, kind);
            CHECK(rel_err(lasso_x_update(inst, beta, spec, x, lam, x), x) < 1e-10);
        }
        ProxSpec dense;
        dense.S = ProxMatrix::dense(testing_support::random_psd(gen, 80));
        CHECK(rel_err(lasso_x_update(inst, beta, dense, x, lam, x), x) < 1e-10);
    }
    SUBCASE("tall data matches a dense solve")
    {
        const Matrix T = random_matrix(gen, 30, 10);
        auto tall = shared(instance_from_data(T, random_vector(gen, 30), 0.1));
        const Vector y = random_vector(gen, 10), lam = random_vector(gen, 10),
                     xp = random_vector(gen, 10);
        for (ProxKind kind : {ProxKind::Zero, ProxKind::SemiDef, ProxKind::Indef})
        {
            const ProxSpec spec = make_prox_spec(*tall, beta, kind);
            Matrix K = T.transpose() * T + beta * Matrix::Identity(10, 10);
            Vector rhs = tall->Atb + beta * y + lam;
            if (!spec.S.is_zero())
            {
                K += spec.S.to_dense(10);
                rhs += spec.S.apply(xp);
            }
            CHECK(rel_err(lasso_x_update(tall, beta, spec, y, lam, xp), K.lu().solve(rhs))
                  < 1e-10);
        }
    }
    SUBCASE("wide data matches a dense solve")
    {
        const Vector y = random_vector(gen, 80), lam = random_vector(gen, 80),
                     xp = random_vector(gen, 80);
        const ProxSpec spec = make_prox_spec(*inst, beta, ProxKind::SemiDef);
        const Matrix K = A.transpose() * A + beta * Matrix::Identity(80, 80) + spec.S.to_dense(80);
        const Vector rhs = inst->Atb + beta * y + lam + spec.S.apply(xp);
        CHECK(rel_err(lasso_x_update(inst, beta, spec, y, lam, xp), K.lu().solve(rhs)) < 1e-10);
    }
    CHECK_THROWS_AS(XUpdateSolver(inst, 0.0, ProxMatrix::zero()), std::invalid_argument);
    CHECK_THROWS_AS(XUpdateSolver(nullptr, 1.0, ProxMatrix::zero()), std::invalid_argument);
}

TEST_CASE("split problem")
{
    auto inst = shared(generate_instance(200, 0.2, 9));
    const SplitProblem prob = make_split_problem(inst);
    CHECK(prob.n1() == 200);
    CHECK(prob.B.is_scaled_identity());
    CHECK(prob.B.scale() == -1.0);

    SUBCASE("every step size pair reaches the same objective")
    {
        double ref = 0.0;
        for (auto [a, g] : {std::pair{0.0, 1.0}, {0.618, 1.0}, {0.3, 0.8}, {0.0, 1.5},
                            {0.5, 1.2}})
        {
            CAPTURE(a);
            CAPTURE(g);
            SolverParams p;
            p.alpha = a;
            p.gamma = g;
            p.tol = 1e-9;
            p.max_iters = 20000;
            p.snapshot_stride = 0;
            const RunRecord rec = solve(prob, p);
            CHECK(rec.stop_reason == StopReason::Tolerance);
            const double obj = rec.objective_values.back();
            if (ref == 0.0)
                ref = obj;
            CHECK(std::abs(obj - ref) <= 1e-4 * ref);
            // objective is below its value at the start
            CHECK(obj < lasso_objective(*inst, Vector::Zero(200), Vector::Zero(200)));
        }
    }
    SUBCASE("proximal x-updates run through the solver")
    {
        for (ProxKind kind : {ProxKind::SemiDef, ProxKind::Indef})
        {
            SolverParams p;
            p.alpha = 0.618;
            p.S = make_prox_spec(*inst, 1.0, kind).S;
            p.stop_rule = StopRule::Cheap;
            p.snapshot_stride = 0;
            const RunRecord rec = solve(prob, p);
            CHECK(rec.stop_reason == StopReason::Tolerance);
        }
    }
    SUBCASE("T must be zero")
    {
        SolverParams p;
        p.T = ProxMatrix::dense(Matrix::Identity(200, 200));
        CHECK_THROWS_AS(solve(prob, p), SolverError);
    }
    CHECK_THROWS_AS(make_split_problem(nullptr), std::invalid_argument);
}
