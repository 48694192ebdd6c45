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

#include "sprsm/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sprsm
{
namespace
{
const Snapshot& need(const RunRecord& record, int k)
{
    const Snapshot* s = record.find(k);
    if (!s)
    {
        throw std::invalid_argument("missing snapshot w^" + std::to_string(k)
                                    + " (run with snapshot_stride = 1)");
    }
    return *s;
}

Vector residual_of(const SplitProblem& problem, const Snapshot& s)
{
    return problem.A.apply(s.x) + problem.B.apply(s.y) - problem.b;
}

double g_dist(const SplitProblem& problem,
              const SolverParams& params,
              const Snapshot& a,
              const Snapshot& b)
{
    return g_norm_sq_split(params, problem.B, a.x - b.x, a.y - b.y,
                           a.lambda - b.lambda);
}

double g_dist(const SplitProblem& problem,
              const SolverParams& params,
              const Snapshot& a,
              const SamplePoint& w)
{
    return g_norm_sq_split(params, problem.B, a.x - w.x, a.y - w.y,
                           a.lambda - w.lambda);
}

/// rho |r^1|^2 + eta |y^1 - y^0|_T^2
double startup_terms(const SplitProblem& problem,
                     const SolverParams& params,
                     const RunRecord& record,
                     const ContractionConstants& constants)
{
    const Snapshot& w0 = need(record, 0);
    const Snapshot& w1 = need(record, 1);
    return constants.rho * residual_of(problem, w1).squaredNorm()
           + constants.eta * params.T.quad(w1.y - w0.y);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

std::string format_line(const AuditLine& line)
{
    std::string out = line.name + "\t" + (line.passed ? "PASS" : "FAIL")
                      + "\tworst=" + fmt(line.worst);
    if (!line.detail.empty())
    {
        out += "\t" + line.detail;
    }
    return out;
}

std::string format_report(const std::vector<AuditLine>& lines)
{
    std::string out;
    for (const auto& l : lines)
    {
        out += format_line(l);
        out += '\n';
    }
    return out;
}

ReferenceSolution compute_reference(const SplitProblem& problem, double tight_tol)
{
    SolverParams params = reduce_to(NamedMethod::ADMM1);
    params.tol = tight_tol;
    params.max_iters = 100000;
    params.stop_rule = StopRule::Full;
    params.snapshot_stride = 0;
    const RunRecord rec = solve(problem, params);

    ReferenceSolution ref;
    ref.x = rec.final_state.x;
    ref.y = rec.final_state.y;
    ref.lambda = rec.final_state.lambda;
    ref.iterations = rec.iterations;
    ref.reached_tolerance = rec.stop_reason == StopReason::Tolerance;
    ref.accuracy = rec.iterations > 0
                       ? std::max(rec.dy_B_norms.back(), rec.residual_norms.back())
                       : rec.final_state.r.norm();
    return ref;
}

ReferenceSolution require_reference(const SplitProblem& problem, double tight_tol)
{
    ReferenceSolution ref = compute_reference(problem, tight_tol);
    if (!ref.reached_tolerance)
    {
        throw std::runtime_error("reference solution stalled at accuracy "
                                 + fmt(ref.accuracy) + " after "
                                 + std::to_string(ref.iterations)
                                 + " iterations (wanted " + fmt(tight_tol) + ")");
    }
    return ref;
}

Vector optimality_operator(const SplitProblem& problem,
                           const Vector& x,
                           const Vector& y,
                           const Vector& lambda)
{
    if (!problem.subgradient_x || !problem.subgradient_y)
    {
        throw std::invalid_argument(
            "optimality_operator: problem has no subgradient selections");
    }
    const Index n1 = problem.n1();
    const Index n2 = problem.n2();
    Vector F(n1 + n2 + problem.m());
    F.head(n1) = problem.subgradient_x(x) - problem.A.apply_transpose(lambda);
    F.segment(n1, n2) = problem.subgradient_y(y) - problem.B.apply_transpose(lambda);
    F.tail(problem.m()) = problem.A.apply(x) + problem.B.apply(y) - problem.b;
    return F;
}

Vector realized_subgradient_y(const SplitProblem& problem,
                              const SolverParams& params,
                              const Snapshot& prev,
                              const Snapshot& next)
{
    const Vector r = residual_of(problem, next);
    return problem.B.apply_transpose(next.lambda)
           - (1.0 - params.gamma) * params.beta * problem.B.apply_transpose(r)
           - params.T.apply(next.y - prev.y);
}

LyapunovSeries lyapunov_series(const SplitProblem& problem,
                               const SolverParams& params,
                               const RunRecord& record,
                               const ContractionConstants& constants,
                               const ReferenceSolution& w_star)
{
    LyapunovSeries series;
    const int K = record.iterations;
    for (int k = 1; k <= K; ++k)
    {
        const Snapshot& wk = need(record, k);
        const Snapshot& wprev = need(record, k - 1);
        const double phi =
            ghat_norm_sq_split(problem, params, wk.x - w_star.x, wk.y - w_star.y,
                               wk.lambda - w_star.lambda)
            + constants.rho * residual_of(problem, wk).squaredNorm()
            + constants.eta * params.T.quad(wk.y - wprev.y);
        series.values.push_back(phi);
        if (k < K)
        {
            const Snapshot& wnext = need(record, k + 1);
            const Vector dx = wk.x - wnext.x;
            const Vector dy = wk.y - wnext.y;
            const Vector dl = wk.lambda - wnext.lambda;
            series.step_ghat.push_back(
                ghat_norm_sq_split(problem, params, dx, dy, dl));
            series.step_g.push_back(g_norm_sq_split(params, problem.B, dx, dy, dl));
        }
    }
    return series;
}

AuditLine ContractionAudit::line(const std::string& name) const
{
    return {name, passed, worst_margin,
            "threshold=" + fmt(threshold) + " steps=" + std::to_string(margins.size())};
}

ContractionAudit audit_contraction(const SplitProblem& problem,
                                   const SolverParams& params,
                                   const RunRecord& record,
                                   const ContractionConstants& constants,
                                   const ReferenceSolution& w_star)
{
    if (record.iterations < 2)
    {
        throw std::invalid_argument("audit_contraction: needs at least 2 iterations");
    }
    const LyapunovSeries series =
        lyapunov_series(problem, params, record, constants, w_star);
    ContractionAudit audit;
    const double slack = 1e-8 * (1.0 + series.values.front());
    audit.threshold = -slack;
    audit.worst_margin = std::numeric_limits<double>::infinity();
    audit.lyapunov_monotone = true;
    for (std::size_t i = 0; i + 1 < series.values.size(); ++i)
    {
        const double margin = series.values[i] - series.values[i + 1]
                              - constants.tau_hat * series.step_ghat[i];
        audit.margins.push_back(margin);
        audit.worst_margin = std::min(audit.worst_margin, margin);
        if (series.values[i + 1] > series.values[i] + slack)
        {
            audit.lyapunov_monotone = false;
        }
    }
    audit.passed = audit.worst_margin >= audit.threshold;
    return audit;
}

AuditLine ErgodicAudit::line(const std::string& name) const
{
    return {name, passed, worst,
            "t=" + std::to_string(t) + " bound=" + fmt(bound)
                + " derived=" + (derived_passed ? "PASS" : "FAIL")};
}

ErgodicAudit audit_ergodic(const SplitProblem& problem,
                           const SolverParams& params,
                           const RunRecord& record,
                           const ContractionConstants& constants,
                           int t,
                           const std::vector<SamplePoint>& samples)
{
    const ErgodicPoint avg = ergodic_average(record, t);
    const Snapshot& w0 = need(record, 0);
    const Snapshot& w1 = need(record, 1);
    const double extra = startup_terms(problem, params, record, constants);

    ErgodicAudit audit;
    audit.t = t;
    audit.bound = (g_dist(problem, params, w1, w0) + extra) / (2.0 * t);
    audit.worst = -std::numeric_limits<double>::infinity();
    audit.passed = true;
    audit.derived_passed = true;

    const double feas_tol = 1e-10 * (1.0 + problem.b.norm());
    for (const SamplePoint& w : samples)
    {
        const Vector r = problem.A.apply(w.x) + problem.B.apply(w.y) - problem.b;
        if (r.norm() > feas_tol)
        {
            throw std::invalid_argument("audit_ergodic: infeasible sample, |r| = "
                                        + fmt(r.norm()));
        }
        const Vector F = optimality_operator(problem, w.x, w.y, w.lambda);
        const Index n1 = problem.n1();
        const Index n2 = problem.n2();
        const double inner = (avg.x_bar - w.x).dot(F.head(n1))
                             + (avg.y_bar - w.y).dot(F.segment(n1, n2))
                             + (avg.lambda_bar - w.lambda).dot(F.tail(problem.m()));
        const double v = inner - audit.bound;
        audit.violations.push_back(v);
        audit.worst = std::max(audit.worst, v);
        if (v > 1e-8 * (1.0 + audit.bound))
        {
            audit.passed = false;
        }
        const double derived_bound = (g_dist(problem, params, w1, w) + extra) / (2.0 * t);
        const double dv = inner - derived_bound;
        audit.derived_violations.push_back(dv);
        if (dv > 1e-8 * (1.0 + derived_bound))
        {
            audit.derived_passed = false;
        }
    }
    return audit;
}

AuditLine NonergodicAudit::line(const std::string& name) const
{
    return {name, monotone && final_bound_ok, worst_ratio,
            std::string("monotone=") + (monotone ? "yes" : "no")
                + " bound=" + (final_bound_ok ? "yes" : "no")};
}

NonergodicAudit audit_nonergodic(const SplitProblem& problem,
                                 const SolverParams& params,
                                 const RunRecord& record,
                                 const ContractionConstants& constants,
                                 const ReferenceSolution* w_star)
{
    if (!(params.gamma > 0.0 && params.gamma <= 1.0))
    {
        throw std::invalid_argument(
            "audit_nonergodic: the O(1/t) step bound needs gamma in (0, 1]");
    }
    if (record.iterations < 1)
    {
        throw std::invalid_argument("audit_nonergodic: empty run");
    }
    NonergodicAudit audit;
    const int K = record.iterations;
    for (int k = 0; k < K; ++k)
    {
        audit.steps.push_back(
            g_dist(problem, params, need(record, k + 1), need(record, k)));
    }

    // slack is relative to the first step, the scale of the whole sequence
    audit.monotone = true;
    const double slack = 1e-10 * std::abs(audit.steps.front());
    for (std::size_t k = 0; k + 1 < audit.steps.size(); ++k)
    {
        if (audit.steps[k + 1] > audit.steps[k] + slack)
        {
            audit.monotone = false;
        }
    }

    const double extra = startup_terms(problem, params, record, constants);
    const Snapshot& w0 = need(record, 0);
    const Snapshot& w1 = need(record, 1);
    const double base = g_dist(problem, params, w1, w0) + extra;
    double derived_base = 0.0;
    if (w_star)
    {
        derived_base = g_norm_sq_split(params, problem.B, w1.x - w_star->x,
                                       w1.y - w_star->y, w1.lambda - w_star->lambda)
                       + extra;
    }
    audit.final_bound_ok = true;
    audit.derived_bound_ok = w_star != nullptr;
    audit.worst_ratio = 0.0;
    for (int t = 1; t < K; ++t)
    {
        const double step = audit.steps[static_cast<std::size_t>(t)];
        const double bound = base / (constants.tau * t);
        if (step > bound * (1.0 + 1e-8))
        {
            audit.final_bound_ok = false;
        }
        if (bound > 0.0)
        {
            audit.worst_ratio = std::max(audit.worst_ratio, step / bound);
        }
        if (w_star && step > derived_base / (constants.tau * t) * (1.0 + 1e-8))
        {
            audit.derived_bound_ok = false;
        }
    }
    return audit;
}

AuditLine LinearRateEstimate::line(const std::string& name) const
{
    return {name, passed, q,
            "bound=" + fmt(bound) + " c=" + fmt(c) + " c_max=" + fmt(c_max)
                + " ratios=" + std::to_string(ratios_used)
                + (ambiguous ? " (estimate)" : "")};
}

LinearRateEstimate estimate_linear_rate(const SplitProblem& problem,
                                        const SolverParams& params,
                                        const RunRecord& record,
                                        const ReferenceSolution& w_star,
                                        const ContractionConstants& constants,
                                        const SmoothStrongConvexity& theta2)
{
    if (!params.S.is_zero() || !params.T.is_zero())
    {
        throw std::invalid_argument("estimate_linear_rate: needs S = T = 0");
    }
    if (!(theta2.mu > 0.0 && theta2.L >= theta2.mu))
    {
        throw std::invalid_argument("estimate_linear_rate: needs 0 < mu <= L");
    }
    LinearRateEstimate est;
    for (int k = 0; k <= record.iterations; ++k)
    {
        const Snapshot& s = need(record, k);
        est.energies.push_back(
            h_norm_sq(problem.B, params.alpha, params.gamma, params.beta,
                      s.y - w_star.y, s.lambda - w_star.lambda)
            + constants.rho * residual_of(problem, s).squaredNorm());
    }

    // usable window: E_0..E_last with every entry above the floor
    std::size_t last = 0;
    while (last + 1 < est.energies.size() && est.energies[last + 1] >= 1e-24)
    {
        ++last;
    }
    const std::size_t ratios = last;
    if (ratios < 5 || est.energies.front() < 1e-24)
    {
        throw std::runtime_error("estimate_linear_rate: only "
                                 + std::to_string(ratios)
                                 + " usable ratios (need 5)");
    }
    est.monotone = true;
    for (std::size_t k = 0; k < ratios; ++k)
    {
        if (!(est.energies[k + 1] < est.energies[k]))
        {
            est.monotone = false;
        }
    }
    const std::size_t first = ratios / 2;
    double log_sum = 0.0;
    for (std::size_t k = first; k < ratios; ++k)
    {
        log_sum += std::log(est.energies[k + 1] / est.energies[k]);
    }
    est.ratios_used = static_cast<int>(ratios - first);
    est.q = std::exp(log_sum / est.ratios_used);

    const Matrix B = problem.B.to_dense();
    const Matrix BBt = B * B.transpose();
    const double lmin = symmetric_min_eigenvalue(BBt);
    const double lmax = symmetric_max_eigenvalue(BBt);  // |B|^2
    if (!(lmin > 0.0))
    {
        throw std::invalid_argument("estimate_linear_rate: B B^T is singular");
    }
    est.kappa_B = std::sqrt(lmax / lmin);
    const double mu = theta2.mu;
    const double L = theta2.L;
    const double beta = params.beta;
    const double cag = c_alpha_gamma(params.alpha, params.gamma);
    est.c_max = cag / (est.kappa_B * std::sqrt(L / mu));

    if (params.gamma == 1.0)
    {
        // t = mu L / (mu L + beta^2 |B|^2 lmin) balances both terms of c1
        const double c1 = mu * beta * lmin / (mu * L + beta * beta * lmax * lmin);
        est.c = 2.0 * c1 * cag;
    }
    else
    {
        est.ambiguous = true;
        const double t = 0.5;
        const double cs = 2.0;
        const double c1 = std::min(mu * (1.0 - t) / (beta * lmax),
                                   (1.0 - 1.0 / cs) * lmin * beta * t / L);
        const double c2 = (1.0 - cs) * std::abs(params.gamma - 1.0) * lmin * t / L;
        double second = std::numeric_limits<double>::infinity();
        if (constants.rho > 0.0)
        {
            second = (2.0 * c2 + params.alpha + params.gamma) * beta / constants.rho;
        }
        est.c = std::min(2.0 * c1 * cag, second);
    }
    est.bound = est.c > 0.0 ? 1.0 / (1.0 + est.c) : 1.0;
    est.passed = est.q < 1.0 && est.q <= est.bound * (1.0 + 1e-6);
    return est;
}

QuadraticInstance make_quadratic_instance(const Matrix& C, const Vector& d, double mu)
{
    if (!(mu > 0.0))
    {
        throw std::invalid_argument("make_quadratic_instance: mu must be positive");
    }
    if (C.rows() != d.size())
    {
        throw std::invalid_argument("make_quadratic_instance: C and d disagree");
    }
    const Index n = C.cols();
    auto CtC = std::make_shared<const Matrix>(C.transpose() * C);
    auto Ctd = std::make_shared<const Vector>(C.transpose() * d);
    auto Cp = std::make_shared<const Matrix>(C);
    auto dp = std::make_shared<const Vector>(d);

    QuadraticInstance q;
    SplitProblem& p = q.problem;
    p.A = LinearMap::scaled_identity(n, 1.0);
    p.B = LinearMap::scaled_identity(n, -1.0);
    p.b = Vector::Zero(n);
    p.x_subproblem = [CtC, Ctd, n](const Vector& y, const Vector& lambda,
                                   double beta, const ProxMatrix& S,
                                   const Vector& x_prev) -> Vector {
        Matrix K = *CtC + S.to_dense(n);
        K.diagonal().array() += beta;
        Vector rhs = *Ctd + lambda + beta * y + S.apply(x_prev);
        return K.ldlt().solve(rhs);
    };
    p.y_subproblem = [mu, n](const Vector& x, const Vector& lambda_half,
                             double beta, const ProxMatrix& T,
                             const Vector& y_prev) -> Vector {
        Vector rhs = beta * x - lambda_half + T.apply(y_prev);
        if (T.is_zero())
        {
            return rhs / (mu + beta);
        }
        Matrix K = T.to_dense(n);
        K.diagonal().array() += mu + beta;
        return K.ldlt().solve(rhs);
    };
    p.objective = [Cp, dp, mu](const Vector& x, const Vector& y) {
        return 0.5 * ((*Cp) * x - *dp).squaredNorm() + 0.5 * mu * y.squaredNorm();
    };
    p.subgradient_x = [CtC, Ctd](const Vector& x) -> Vector {
        return (*CtC) * x - *Ctd;
    };
    p.subgradient_y = [mu](const Vector& y) -> Vector { return mu * y; };

    Matrix K = *CtC;
    K.diagonal().array() += mu;
    q.solution.x = K.ldlt().solve(*Ctd);
    q.solution.y = q.solution.x;
    q.solution.lambda = -mu * q.solution.x;
    q.solution.accuracy = 0.0;
    q.solution.reached_tolerance = true;
    q.theta2 = {mu, mu};
    return q;
}

}  // namespace sprsm
