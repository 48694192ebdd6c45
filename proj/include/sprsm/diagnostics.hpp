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

#include <string>
#include <vector>

#include "sprsm/solver.hpp"

namespace sprsm
{
/// A numerically computed member of the solution set.
struct ReferenceSolution
{
    Vector x;
    Vector y;
    Vector lambda;
    /// max(|B(y^{k+1} - y^k)|, |r^{k+1}|) at the returned iterate.
    double accuracy = 0.0;
    int iterations = 0;
    bool reached_tolerance = false;
};

/// One line of an audit report.
struct AuditLine
{
    std::string name;
    bool passed = false;
    double worst = 0.0;
    std::string detail;
};

/// "name<TAB>PASS|FAIL<TAB>worst=<value>[<TAB>detail]"
std::string format_line(const AuditLine& line);
std::string format_report(const std::vector<AuditLine>& lines);

/// Phi_k = |w^k - w*|_Ghat^2 + rho |r^k|^2 + eta |y^k - y^{k-1}|_T^2 for
/// k = 1..K and the step quantities |w^k - w^{k+1}|^2 in Ghat and G for
/// k = 1..K-1. values[i] is Phi_{i+1}.
struct LyapunovSeries
{
    std::vector<double> values;
    std::vector<double> step_ghat;
    std::vector<double> step_g;
};

/// Runs ADMM (alpha = 0, gamma = 1, S = T = 0) with tol = tight_tol and up
/// to 1e5 iterations. If tight_tol is not reached the result carries
/// reached_tolerance = false and the best accuracy seen; audits should
/// treat that as an error.
ReferenceSolution compute_reference(const SplitProblem& problem,
                                    double tight_tol = 1e-10);

/// Throws std::runtime_error with the achieved accuracy when the reference
/// did not converge.
ReferenceSolution require_reference(const SplitProblem& problem,
                                    double tight_tol = 1e-10);

/// F(w) = (xi_x - A^T lambda, xi_y - B^T lambda, A x + B y - b) with the
/// problem's subgradient selections.
Vector optimality_operator(const SplitProblem& problem,
                           const Vector& x,
                           const Vector& y,
                           const Vector& lambda);

/// The element of d theta2(y^{k+1}) that the y-update realizes when
/// Y = R^{n2}:  B^T lambda^{k+1} - (1 - gamma) beta B^T r^{k+1}
///             - T (y^{k+1} - y^k).
Vector realized_subgradient_y(const SplitProblem& problem,
                              const SolverParams& params,
                              const Snapshot& prev,
                              const Snapshot& next);

LyapunovSeries lyapunov_series(const SplitProblem& problem,
                               const SolverParams& params,
                               const RunRecord& record,
                               const ContractionConstants& constants,
                               const ReferenceSolution& w_star);

struct ContractionAudit
{
    /// margins[i] = Phi_k - Phi_{k+1} - tau_hat |w^k - w^{k+1}|_Ghat^2, k = i+1.
    std::vector<double> margins;
    double worst_margin = 0.0;
    double threshold = 0.0;
    bool passed = false;
    /// Phi nonincreasing within the same slack.
    bool lyapunov_monotone = false;

    AuditLine line(const std::string& name) const;
};

/// Needs every snapshot and at least two iterations.
ContractionAudit audit_contraction(const SplitProblem& problem,
                                   const SolverParams& params,
                                   const RunRecord& record,
                                   const ContractionConstants& constants,
                                   const ReferenceSolution& w_star);

struct SamplePoint
{
    Vector x;
    Vector y;
    Vector lambda;
};

struct ErgodicAudit
{
    int t = 0;
    /// (|w^1 - w^0|_G^2 + rho |r^1|^2 + eta |y^1 - y^0|_T^2) / (2t).
    double bound = 0.0;
    /// <wbar_t - w, F(w)> - bound, per sample.
    std::vector<double> violations;
    /// Same with |w^1 - w|_G^2 in place of |w^1 - w^0|_G^2, which is what
    /// summing the per-step inequality produces.
    std::vector<double> derived_violations;
    double worst = 0.0;
    bool passed = false;
    bool derived_passed = false;

    AuditLine line(const std::string& name) const;
};

/// Samples must be feasible (|A x + B y - b| <= 1e-10 (1 + |b|)); an
/// infeasible sample is rejected with std::invalid_argument naming its
/// residual. Requires t + 1 <= record.iterations.
ErgodicAudit audit_ergodic(const SplitProblem& problem,
                           const SolverParams& params,
                           const RunRecord& record,
                           const ContractionConstants& constants,
                           int t,
                           const std::vector<SamplePoint>& samples);

struct NonergodicAudit
{
    /// |w^{k+1} - w^k|_G^2 for k = 0..K-1.
    std::vector<double> steps;
    bool monotone = false;
    bool final_bound_ok = false;
    /// Bound with |w^1 - w*|_G^2, only when a reference was supplied.
    bool derived_bound_ok = false;
    /// max over t of steps[t] / bound(t) (bound as stated).
    double worst_ratio = 0.0;

    AuditLine line(const std::string& name) const;
};

/// gamma must lie in (0, 1]; gamma > 1 throws std::invalid_argument.
NonergodicAudit audit_nonergodic(const SplitProblem& problem,
                                 const SolverParams& params,
                                 const RunRecord& record,
                                 const ContractionConstants& constants,
                                 const ReferenceSolution* w_star = nullptr);

/// Strong convexity / smoothness of theta2 for the linear-rate estimate.
struct SmoothStrongConvexity
{
    double mu = 1.0;
    double L = 1.0;
};

struct LinearRateEstimate
{
    /// E_k = |v^k - v*|_H^2 + rho |r^k|^2, k = 0..K.
    std::vector<double> energies;
    /// Geometric mean of E_{k+1}/E_k over the last half of the usable run.
    double q = 1.0;
    int ratios_used = 0;
    /// c from the rate theorem at the chosen (t, rho) and 1/(1 + c).
    double c = 0.0;
    double bound = 1.0;
    /// c_{alpha,gamma} / (kappa_B sqrt(kappa_theta2)).
    double c_max = 0.0;
    double kappa_B = 1.0;
    /// gamma != 1: the general constant mixes beta inconsistently in the
    /// source derivation; treat c as an estimate.
    bool ambiguous = false;
    bool monotone = false;
    bool passed = false;

    AuditLine line(const std::string& name) const;
};

/// Needs S = T = 0 and every snapshot. Energies below 1e-24 end the fit
/// window; fewer than 5 usable ratios throws std::runtime_error.
LinearRateEstimate estimate_linear_rate(const SplitProblem& problem,
                                        const SolverParams& params,
                                        const RunRecord& record,
                                        const ReferenceSolution& w_star,
                                        const ContractionConstants& constants,
                                        const SmoothStrongConvexity& theta2);

/// theta1(x) = 1/2 |C x - d|^2, theta2(y) = mu/2 |y|^2, x - y = 0.
/// Meets the linear-rate assumptions with L = mu.
struct QuadraticInstance
{
    SplitProblem problem;
    ReferenceSolution solution;  // closed form
    SmoothStrongConvexity theta2;
};

QuadraticInstance make_quadratic_instance(const Matrix& C,
                                          const Vector& d,
                                          double mu);

}  // namespace sprsm
