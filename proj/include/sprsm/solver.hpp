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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sprsm/core_model.hpp"

namespace sprsm
{
/// Raised when an oracle throws or an iterate stops being finite.
class SolverError : public std::runtime_error
{
   public:
    SolverError(int iteration, const std::string& what);
    int iteration() const { return iteration_; }

   private:
    int iteration_;
};

enum class StopReason
{
    Tolerance,
    MaxIters
};

std::string to_string(StopReason reason);

/// w^k = (x^k, y^k, lambda^k).
struct Snapshot
{
    int k = 0;
    Vector x;
    Vector y;
    Vector lambda;
};

struct RunRecord
{
    /// w^0 first, then w^k for every k kept by the snapshot stride, and
    /// always the final iterate.
    std::vector<Snapshot> iterates;
    /// Entry k-1 belongs to the step w^{k-1} -> w^k, k = 1..iterations.
    std::vector<double> residual_norms;  // |r^k|
    std::vector<double> dy_B_norms;      // |B(y^{k-1} - y^k)|
    std::vector<double> dx_S_norms;      // |x^k - x^{k-1}|_S
    std::vector<double> dy_T_norms;      // |y^k - y^{k-1}|_T
    std::vector<double> objective_values;
    StopReason stop_reason = StopReason::MaxIters;
    int iterations = 0;
    int snapshot_stride = 1;
    IterState final_state;

    /// Snapshot of w^k, or nullptr if it was thinned out.
    const Snapshot* find(int k) const;
};

struct StepNorms
{
    double dx_S = 0.0;
    double dy_T = 0.0;
    double dy_B = 0.0;
    double residual = 0.0;
};

struct ErgodicPoint
{
    Vector x_bar;
    Vector y_bar;
    Vector lambda_bar;
    int t = 0;
};

enum class NamedMethod
{
    ADMM1,
    ADMM2,
    SCPRSM,
    PRSM
};

/// Zero start with r = -b.
IterState initial_state(const SplitProblem& problem);
/// Start from a given (x, y, lambda).
IterState initial_state(const SplitProblem& problem,
                        const Vector& x,
                        const Vector& y,
                        const Vector& lambda);

/// One sweep of
///   x+      = argmin L(x, y, lambda) + |x - x|_S^2 / 2
///   lambda' = lambda - alpha beta (A x+ + B y - b)
///   y+      = argmin L(x+, y, lambda') + |y - y|_T^2 / 2
///   lambda+ = lambda' - gamma beta (A x+ + B y+ - b)
/// The half step uses the current y, not y+.
IterState sp_prsm_step(const SplitProblem& problem,
                       const SolverParams& params,
                       const IterState& state);

StepNorms step_norms(const SplitProblem& problem,
                     const SolverParams& params,
                     const IterState& prev,
                     const IterState& next);

bool stopping_check(const StepNorms& norms, const SolverParams& params);
bool stopping_check(const SplitProblem& problem,
                    const SolverParams& params,
                    const IterState& prev,
                    const IterState& next);

/// Iterate until the stopping rule fires or max_iters steps have run.
/// Validates problem and params first (std::invalid_argument); throws
/// SolverError on oracle failure or non-finite iterates.
RunRecord solve(const SplitProblem& problem,
                const SolverParams& params,
                const std::optional<IterState>& warm_start = std::nullopt);

/// Mean of w^{k+1}, k = 1..t. Needs snapshots 2..t+1, so t < iterations.
ErgodicPoint ergodic_average(const RunRecord& record, int t);

/// (alpha, gamma, S, T) of a classical special case. alpha is only read
/// for SCPRSM and must lie in (0, 1). PRSM is returned with domain
/// enforcement switched off: no known domain covers alpha = gamma = 1.
SolverParams reduce_to(NamedMethod method, double alpha = 0.5);

}  // namespace sprsm
