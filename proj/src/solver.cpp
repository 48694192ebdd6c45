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

#include "sprsm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sprsm
{
SolverError::SolverError(int iteration, const std::string& what)
    : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration)
{
}

std::string to_string(StopReason reason)
{
    return reason == StopReason::Tolerance ? "tolerance" : "max_iters";
}

const Snapshot* RunRecord::find(int k) const
{
    // snapshots are sorted by k
    auto it = std::lower_bound(
        iterates.begin(), iterates.end(), k,
        [](const Snapshot& s, int key) { return s.k < key; });
    if (it == iterates.end() || it->k != k)
    {
        return nullptr;
    }
    return &*it;
}

IterState initial_state(const SplitProblem& problem)
{
    return initial_state(problem, Vector::Zero(problem.n1()),
                         Vector::Zero(problem.n2()), Vector::Zero(problem.m()));
}

IterState initial_state(const SplitProblem& problem,
                        const Vector& x,
                        const Vector& y,
                        const Vector& lambda)
{
    if (x.size() != problem.n1() || y.size() != problem.n2()
        || lambda.size() != problem.m())
    {
        throw std::invalid_argument("initial_state: dimension mismatch");
    }
    IterState s;
    s.x = x;
    s.y = y;
    s.y_prev = y;
    s.lambda = lambda;
    s.lambda_half = lambda;
    s.r = problem.A.apply(x) + problem.B.apply(y) - problem.b;
    s.k = 0;
    return s;
}

namespace
{
bool all_finite(const Vector& v) { return v.allFinite(); }

void check_finite(const IterState& s)
{
    if (!all_finite(s.x) || !all_finite(s.y) || !all_finite(s.lambda))
    {
        throw SolverError(s.k, "non-finite iterate");
    }
}
}  // namespace

IterState sp_prsm_step(const SplitProblem& problem,
                       const SolverParams& params,
                       const IterState& state)
{
    const int k_next = state.k + 1;
    const double beta = params.beta;

    IterState next;
    try
    {
        next.x = problem.x_subproblem(state.y, state.lambda, beta, params.S,
                                      state.x);
    }
    catch (const SolverError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw SolverError(k_next, std::string("x-subproblem failed: ") + e.what());
    }
    if (next.x.size() != problem.n1())
    {
        throw SolverError(k_next, "x-subproblem returned wrong dimension");
    }

    const Vector Ax = problem.A.apply(next.x);
    const Vector r_half = Ax + problem.B.apply(state.y) - problem.b;
    next.lambda_half = state.lambda - params.alpha * beta * r_half;

    try
    {
        next.y = problem.y_subproblem(next.x, next.lambda_half, beta, params.T,
                                      state.y);
    }
    catch (const std::exception& e)
    {
        throw SolverError(k_next, std::string("y-subproblem failed: ") + e.what());
    }
    if (next.y.size() != problem.n2())
    {
        throw SolverError(k_next, "y-subproblem returned wrong dimension");
    }

    next.r = Ax + problem.B.apply(next.y) - problem.b;
    next.lambda = next.lambda_half - params.gamma * beta * next.r;
    next.y_prev = state.y;
    next.k = k_next;
    check_finite(next);
    return next;
}

StepNorms step_norms(const SplitProblem& problem,
                     const SolverParams& params,
                     const IterState& prev,
                     const IterState& next)
{
    const Vector dx = next.x - prev.x;
    const Vector dy = next.y - prev.y;
    StepNorms n;
    n.dx_S = params.S.seminorm(dx);
    n.dy_T = params.T.seminorm(dy);
    n.dy_B = problem.B.apply(dy).norm();
    n.residual = next.r.norm();
    return n;
}

bool stopping_check(const StepNorms& norms, const SolverParams& params)
{
    double worst = std::max(norms.dy_B, norms.residual);
    if (params.stop_rule == StopRule::Full)
    {
        worst = std::max({worst, norms.dx_S, norms.dy_T});
    }
    return worst <= params.tol;
}

bool stopping_check(const SplitProblem& problem,
                    const SolverParams& params,
                    const IterState& prev,
                    const IterState& next)
{
    return stopping_check(step_norms(problem, params, prev, next), params);
}

RunRecord solve(const SplitProblem& problem,
                const SolverParams& params,
                const std::optional<IterState>& warm_start)
{
    problem.validate();
    params.validate(problem.n1(), problem.n2());

    IterState state = warm_start ? *warm_start : initial_state(problem);
    if (state.x.size() != problem.n1() || state.y.size() != problem.n2()
        || state.lambda.size() != problem.m())
    {
        throw std::invalid_argument("solve: warm start dimension mismatch");
    }
    check_finite(state);

    RunRecord rec;
    rec.snapshot_stride = params.snapshot_stride;
    rec.iterates.push_back({state.k, state.x, state.y, state.lambda});
    const auto reserve = static_cast<std::size_t>(std::min(params.max_iters, 4096));
    rec.residual_norms.reserve(reserve);
    rec.dy_B_norms.reserve(reserve);
    rec.dx_S_norms.reserve(reserve);
    rec.dy_T_norms.reserve(reserve);
    rec.objective_values.reserve(reserve);

    rec.stop_reason = StopReason::MaxIters;
    for (int it = 0; it < params.max_iters; ++it)
    {
        IterState next = sp_prsm_step(problem, params, state);
        const StepNorms norms = step_norms(problem, params, state, next);
        rec.residual_norms.push_back(norms.residual);
        rec.dy_B_norms.push_back(norms.dy_B);
        rec.dx_S_norms.push_back(norms.dx_S);
        rec.dy_T_norms.push_back(norms.dy_T);
        rec.objective_values.push_back(
            problem.objective ? problem.objective(next.x, next.y)
                              : std::numeric_limits<double>::quiet_NaN());
        ++rec.iterations;
        const bool done = stopping_check(norms, params);
        state = std::move(next);
        if (params.snapshot_stride > 0 && state.k % params.snapshot_stride == 0)
        {
            rec.iterates.push_back({state.k, state.x, state.y, state.lambda});
        }
        if (done)
        {
            rec.stop_reason = StopReason::Tolerance;
            break;
        }
    }
    if (rec.iterates.back().k != state.k)
    {
        rec.iterates.push_back({state.k, state.x, state.y, state.lambda});
    }
    rec.final_state = std::move(state);
    return rec;
}

ErgodicPoint ergodic_average(const RunRecord& record, int t)
{
    if (t <= 0)
    {
        throw std::invalid_argument("ergodic_average: t must be positive");
    }
    if (t + 1 > record.iterations)
    {
        throw std::invalid_argument("ergodic_average: t=" + std::to_string(t)
                                    + " needs w^" + std::to_string(t + 1)
                                    + " but the run has "
                                    + std::to_string(record.iterations)
                                    + " iterations");
    }
    ErgodicPoint p;
    p.t = t;
    for (int k = 2; k <= t + 1; ++k)
    {
        const Snapshot* s = record.find(k);
        if (!s)
        {
            throw std::invalid_argument("ergodic_average: snapshot "
                                        + std::to_string(k) + " was thinned out");
        }
        if (k == 2)
        {
            p.x_bar = s->x;
            p.y_bar = s->y;
            p.lambda_bar = s->lambda;
        }
        else
        {
            p.x_bar += s->x;
            p.y_bar += s->y;
            p.lambda_bar += s->lambda;
        }
    }
    p.x_bar /= t;
    p.y_bar /= t;
    p.lambda_bar /= t;
    return p;
}

SolverParams reduce_to(NamedMethod method, double alpha)
{
    SolverParams p;
    switch (method)
    {
        case NamedMethod::ADMM1:
            p.alpha = 0.0;
            p.gamma = 1.0;
            break;
        case NamedMethod::ADMM2:
            p.alpha = 0.0;
            p.gamma = 1.618;
            break;
        case NamedMethod::SCPRSM:
            if (!(alpha > 0.0 && alpha < 1.0))
            {
                throw std::invalid_argument("SC-PRSM needs alpha in (0, 1)");
            }
            p.alpha = alpha;
            p.gamma = alpha;
            break;
        case NamedMethod::PRSM:
            p.alpha = 1.0;
            p.gamma = 1.0;
            p.domain_mode = DomainMode::Extended;
            p.enforce_domain = false;
            break;
    }
    return p;
}

}  // namespace sprsm
