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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reference_methods.hpp"
#include "sprsm/bench.hpp"
#include "sprsm/diagnostics.hpp"
#include "sprsm/lasso.hpp"

using namespace sprsm;

namespace
{
struct Outcome
{
    bool passed = false;
    std::string detail;
};

std::string num(double v, int prec = 3)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

Matrix random_matrix(std::mt19937_64& gen, Index r, Index c, double scale)
{
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = scale * nd(gen);
    return m;
}

Vector random_vector(std::mt19937_64& gen, Index n, double scale = 1.0)
{
    return random_matrix(gen, n, 1, scale).col(0);
}

Matrix random_psd(std::mt19937_64& gen, Index n)
{
    const Matrix F = random_matrix(gen, n, n, 1.0 / std::sqrt(static_cast<double>(n)));
    return F * F.transpose();
}

std::shared_ptr<const lasso::LassoInstance> lasso_instance(int n, double p, std::uint64_t seed)
{
    return std::make_shared<const lasso::LassoInstance>(lasso::generate_instance(n, p, seed));
}

// ---------------------------------------------------------------- 1
Outcome matrix_identities()
{
    std::mt19937_64 gen(20261017);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> rows(1, 50), cols(1, 40);
    double worst_mthm = 0.0, worst_g = 0.0, worst_ghat = 0.0, min_eig_h = 1e300;
    for (int trial = 0; trial < 100; ++trial)
    {
        const Index m = rows(gen), n2 = cols(gen), n1 = cols(gen);
        const Matrix B = random_matrix(gen, m, n2, 1.0 / std::sqrt(static_cast<double>(m)));
        const double alpha = unit(gen) * 0.999;
        const double gamma = (0.001 + 0.998 * unit(gen)) * primary_gamma_bound(alpha);
        const double beta = std::exp(std::log(0.2) + unit(gen) * std::log(25.0));
        worst_mthm = std::max(worst_mthm, check_MtHM(B, alpha, gamma, beta));

        // H is PSD for alpha in [0, 1] and any gamma > 0
        const double a01 = unit(gen);
        const double g_any = 0.01 + 3.0 * unit(gen);
        min_eig_h = std::min(min_eig_h,
                             symmetric_min_eigenvalue(build_H(B, a01, g_any, beta)));

        const Matrix S = random_psd(gen, n1), T = random_psd(gen, n2);
        const Matrix s1 = random_psd(gen, n1), s2 = random_psd(gen, n2);
        SolverParams params;
        params.alpha = alpha;
        params.gamma = gamma;
        params.beta = beta;
        params.S = ProxMatrix::dense(S);
        params.T = ProxMatrix::dense(T);
        SplitProblem prob;
        prob.A = LinearMap::dense(random_matrix(gen, m, n1, 1.0));
        prob.B = LinearMap::dense(B);
        prob.b = Vector::Zero(m);
        prob.sigma1 = ProxMatrix::dense(s1);
        prob.sigma2 = ProxMatrix::dense(s2);

        const Vector dx = random_vector(gen, n1), dy = random_vector(gen, n2),
                     dl = random_vector(gen, m);
        Vector dw(n1 + n2 + m);
        dw << dx, dy, dl;
        const double g_dense = g_norm_sq(build_G(S, T, B, alpha, gamma, beta), dw);
        const double g_split = g_norm_sq_split(params, prob.B, dx, dy, dl);
        worst_g = std::max(worst_g, std::abs(g_dense - g_split) / std::abs(g_dense));
        const double gh_dense =
            g_norm_sq(build_Ghat(s1, s2, S, T, B, alpha, gamma, beta), dw);
        const double gh_split = ghat_norm_sq_split(prob, params, dx, dy, dl);
        worst_ghat = std::max(worst_ghat, std::abs(gh_dense - gh_split) / std::abs(gh_dense));
    }
    Outcome o;
    o.passed = worst_mthm <= 1e-12 && worst_g <= 1e-12 && worst_ghat <= 1e-12
               && min_eig_h >= -1e-10;
    o.detail = "MtHM dev " + num(worst_mthm) + ", G split rel " + num(worst_g)
               + ", Ghat split rel " + num(worst_ghat) + ", min eig H " + num(min_eig_h);
    return o;
}

// ---------------------------------------------------------------- 2
double compare_to_reference(const std::vector<reference::Iterate>& ref,
                            const RunRecord& rec,
                            double beta)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k)
    {
        const Snapshot* s = rec.find(static_cast<int>(k) + 1);
        if (!s)
        {
            return 1e300;
        }
        const Vector lambda_ref = -beta * ref[k].u;
        const double scale = std::max({1.0, ref[k].x.lpNorm<Eigen::Infinity>(),
                                       lambda_ref.lpNorm<Eigen::Infinity>()});
        const double d = std::max({(s->x - ref[k].x).lpNorm<Eigen::Infinity>(),
                                   (s->y - ref[k].z).lpNorm<Eigen::Infinity>(),
                                   (s->lambda - lambda_ref).lpNorm<Eigen::Infinity>()});
        worst = std::max(worst, d / scale);
    }
    return worst;
}

Outcome special_cases()
{
    const auto inst = lasso_instance(200, 0.2, 1);
    const SplitProblem prob = lasso::make_split_problem(inst);
    const int iters = 50;
    auto run = [&](SolverParams params) {
        params.tol = 1e-300;
        params.max_iters = iters;
        params.snapshot_stride = 1;
        return solve(prob, params);
    };

    const RunRecord admm = run(reduce_to(NamedMethod::ADMM1));
    const double d_admm = compare_to_reference(
        reference::admm_lasso(*inst->A, inst->b, inst->mu, 1.0, iters), admm, 1.0);
    double d_sc = 0.0;
    for (double a : {0.3, 0.7})
    {
        const RunRecord sc = run(reduce_to(NamedMethod::SCPRSM, a));
        d_sc = std::max(d_sc, compare_to_reference(reference::scprsm_lasso(
                                                       *inst->A, inst->b, inst->mu, 1.0, a, iters),
                                                   sc, 1.0));
    }
    Outcome o;
    o.passed = admm.iterations == iters && d_admm <= 1e-10 && d_sc <= 1e-10;
    o.detail = "max dev vs ADMM " + num(d_admm) + ", vs SC-PRSM(0.3, 0.7) " + num(d_sc);
    return o;
}

// ---------------------------------------------------------------- 3, 4, 5
struct AuditCase
{
    std::shared_ptr<const lasso::LassoInstance> inst;
    SplitProblem problem;
    ReferenceSolution w_star;
};

std::vector<AuditCase>& audit_cases()
{
    static std::vector<AuditCase> cases = [] {
        std::vector<AuditCase> out;
        for (std::uint64_t seed : {1, 2, 3})
        {
            AuditCase c;
            c.inst = lasso_instance(200, 0.2, seed);
            c.problem = lasso::make_split_problem(c.inst);
            c.w_star = require_reference(c.problem, 1e-10);
            out.push_back(std::move(c));
        }
        return out;
    }();
    return cases;
}

RunRecord audit_run(const AuditCase& c, double alpha, double gamma)
{
    SolverParams params;
    params.alpha = alpha;
    params.gamma = gamma;
    params.tol = 1e-9;
    params.max_iters = 2000;
    params.snapshot_stride = 1;
    return solve(c.problem, params);
}

Outcome contraction()
{
    const std::pair<double, double> pairs[] = {
        {0.0, 0.5}, {0.3, 0.7}, {0.618, 1.0}, {0.0, 1.2}, {0.2, 1.1}};
    bool ok = true;
    double worst_rel = 1e300;
    int audits = 0;
    for (const AuditCase& c : audit_cases())
    {
        for (const auto& [a, g] : pairs)
        {
            const RunRecord rec = audit_run(c, a, g);
            const auto k = contraction_constants(a, g);
            SolverParams params;
            params.alpha = a;
            params.gamma = g;
            const ContractionAudit audit =
                audit_contraction(c.problem, params, rec, k, c.w_star);
            ok = ok && audit.passed;
            worst_rel = std::min(worst_rel, audit.worst_margin / -audit.threshold);
            ++audits;
        }
    }
    return {ok, std::to_string(audits) + " runs, worst margin / |threshold| = "
                    + num(worst_rel)};
}

Outcome nonergodic()
{
    const std::pair<double, double> pairs[] = {{0.0, 0.5}, {0.3, 0.5}, {0.0, 1.0}, {0.618, 1.0}};
    bool mono = true, bound = true, derived = true;
    double worst_ratio = 0.0;
    for (const AuditCase& c : audit_cases())
    {
        for (const auto& [a, g] : pairs)
        {
            const RunRecord rec = audit_run(c, a, g);
            SolverParams params;
            params.alpha = a;
            params.gamma = g;
            const NonergodicAudit audit = audit_nonergodic(
                c.problem, params, rec, contraction_constants(a, g), &c.w_star);
            mono = mono && audit.monotone;
            bound = bound && audit.final_bound_ok;
            derived = derived && audit.derived_bound_ok;
            worst_ratio = std::max(worst_ratio, audit.worst_ratio);
        }
    }
    return {mono && bound, std::string("monotone ") + (mono ? "yes" : "no") + ", bound "
                               + (bound ? "yes" : "no") + " (worst step/bound "
                               + num(worst_ratio) + "), w* form " + (derived ? "yes" : "no")};
}

Outcome ergodic()
{
    const std::pair<double, double> pairs[] = {
        {0.0, 0.5}, {0.3, 0.7}, {0.618, 1.0}, {0.0, 1.2}, {0.2, 1.1}};
    std::mt19937_64 gen(7);
    bool ok = true, derived = true;
    double worst = -1e300;
    for (const AuditCase& c : audit_cases())
    {
        const Index n = c.inst->n;
        // w*, the start point, and three perturbations of w*; all with x = y
        std::vector<SamplePoint> samples;
        samples.push_back({c.w_star.y, c.w_star.y, c.w_star.lambda});
        samples.push_back({Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)});
        for (double scale : {1e-3, 1e-1, 1.0})
        {
            const Vector dx = random_vector(gen, n, scale / std::sqrt(double(n)));
            samples.push_back({c.w_star.y + dx, c.w_star.y + dx,
                               c.w_star.lambda + random_vector(gen, n, scale / std::sqrt(double(n)))});
        }
        for (const auto& [a, g] : pairs)
        {
            const RunRecord rec = audit_run(c, a, g);
            SolverParams params;
            params.alpha = a;
            params.gamma = g;
            for (int t : {1, 2, 5, 20, 100, rec.iterations - 1})
            {
                if (t < 1 || t + 1 > rec.iterations)
                    continue;
                const ErgodicAudit audit = audit_ergodic(
                    c.problem, params, rec, contraction_constants(a, g), t, samples);
                ok = ok && audit.passed;
                derived = derived && audit.derived_passed;
                worst = std::max(worst, audit.worst / (1.0 + audit.bound));
            }
        }
    }
    return {ok, "worst violation/(1+bound) " + num(worst) + ", w form "
                    + (derived ? "yes" : "no")};
}

// ---------------------------------------------------------------- 6
// Iteration counts printed in the sweep table of the source (gamma rows,
// alpha columns, -1 for "--").
const int kTable1[11][11] = {
    {-1, 384, 189, 124, 92, 76, 66, 61, 56, 62, 65},
    {384, 189, 124, 92, 73, 63, 56, 52, 48, 51, -1},
    {189, 124, 92, 73, 61, 55, 49, 45, 43, 60, -1},
    {124, 92, 73, 61, 53, 48, 44, 40, 60, -1, -1},
    {92, 73, 61, 53, 48, 44, 40, 61, 246, -1, -1},
    {75, 63, 54, 48, 44, 40, 61, 246, -1, -1, -1},
    {64, 55, 48, 43, 40, 60, 246, -1, -1, -1, -1},
    {60, 52, 45, 40, 60, 243, -1, -1, -1, -1, -1},
    {56, 48, 43, 61, 242, -1, -1, -1, -1, -1, -1},
    {60, 50, 62, -1, -1, -1, -1, -1, -1, -1, -1},
    {63, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1},
};

Outcome table1()
{
    bench::SweepConfig cfg = bench::table1_config();
    const bench::SweepResult res = bench::run_sweep(cfg);
    std::cout << bench::sweep_table(res);

    bool pattern = true;
    int numeric = 0, in_band = 0;
    double worst_dev = 0.0;
    for (std::size_t gi = 0; gi < 11; ++gi)
    {
        for (std::size_t ai = 0; ai < 11; ++ai)
        {
            const bench::SweepCell& cell = res.at(gi, ai);
            const int expected = kTable1[gi][ai];
            if ((expected < 0) == cell.accepted || cell.failed)
            {
                pattern = false;
                continue;
            }
            if (expected < 0)
                continue;
            ++numeric;
            const double dev = std::abs(cell.mean_iters - expected) / expected;
            worst_dev = std::max(worst_dev, dev);
            in_band += dev <= 0.35;
        }
    }

    // anti-diagonal cells alpha + gamma = 1.618 with min(alpha, gamma) >= 0.485
    // must beat every other numeric cell
    double best_other = 1e300;
    std::vector<double> diag;
    for (std::size_t gi = 0; gi < 11; ++gi)
        for (std::size_t ai = 0; ai < 11; ++ai)
        {
            const bench::SweepCell& cell = res.at(gi, ai);
            if (!cell.accepted)
                continue;
            if (gi + ai == 10 && std::min(gi, ai) >= 3)
                diag.push_back(cell.mean_iters);
            else
                best_other = std::min(best_other, cell.mean_iters);
        }
    const auto best = std::count_if(diag.begin(), diag.end(),
                                    [&](double v) { return v <= best_other; });
    const bool claim = 5 * best >= 4 * static_cast<long>(diag.size());

    Outcome o;
    o.passed = pattern && in_band == numeric && claim;
    o.detail = std::string("pattern ") + (pattern ? "exact" : "MISMATCH") + ", "
               + std::to_string(in_band) + "/" + std::to_string(numeric)
               + " cells within 35% (worst " + num(100 * worst_dev) + "%), diagonal best "
               + std::to_string(best) + "/" + std::to_string(diag.size());
    return o;
}

// ---------------------------------------------------------------- 7
Outcome tables234()
{
    bench::ComparisonConfig c2;
    c2.prox_kind = lasso::ProxKind::Zero;
    c2.sizes = {{2000, 0.2}, {2000, 0.3}};
    const auto r2 = bench::run_comparison(c2);
    std::cout << bench::comparison_table(r2);
    bool ratios_ok = !r2.any_failed();
    std::string detail = "ratio1";
    for (const auto& row : r2.rows)
    {
        ratios_ok = ratios_ok && row.ratio1 >= 52.0 && row.ratio1 <= 72.0;
        detail += " " + num(row.ratio1) + "%";
    }

    bench::ComparisonConfig c3;
    c3.prox_kind = lasso::ProxKind::SemiDef;
    c3.sizes = {{2000, 0.1}, {2000, 0.2}, {2000, 0.3}};
    bench::ComparisonConfig c4 = c3;
    c4.prox_kind = lasso::ProxKind::Indef;
    const auto r3 = bench::run_comparison(c3);
    const auto r4 = bench::run_comparison(c4);
    std::cout << bench::comparison_table(r3) << bench::comparison_table(r4);

    int cells = 0, in_band = 0;
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < r3.runs.size(); ++i)
    {
        const auto& semi = r3.runs[i].run;
        const auto& indef = r4.runs[i].run;
        if (semi.failed || indef.failed || semi.seed != indef.seed)
        {
            ratios_ok = false;
            continue;
        }
        const double pct = 100.0 * indef.iters / semi.iters;
        lo = std::min(lo, pct);
        hi = std::max(hi, pct);
        ++cells;
        in_band += pct >= 35.0 && pct <= 65.0;
    }
    const bool indef_ok = cells > 0 && 5 * in_band >= 4 * cells;
    detail += "; indef/semidef " + std::to_string(in_band) + "/" + std::to_string(cells)
              + " in [35, 65]% (range " + num(lo) + ".." + num(hi) + "%)";
    return {ratios_ok && indef_ok, detail};
}

// ---------------------------------------------------------------- 8
Outcome linear_rate()
{
    std::mt19937_64 gen(11);
    const Matrix C = random_matrix(gen, 30, 20, 1.0 / std::sqrt(30.0));
    const Vector d = random_vector(gen, 30);
    const QuadraticInstance q = make_quadratic_instance(C, d, 1.0);
    SolverParams params = reduce_to(NamedMethod::ADMM1);
    params.tol = 1e-300;
    params.max_iters = 200;
    params.snapshot_stride = 1;
    const RunRecord rec = solve(q.problem, params);
    const LinearRateEstimate est = estimate_linear_rate(
        q.problem, params, rec, q.solution, contraction_constants(0.0, 1.0), q.theta2);
    return {est.passed && est.monotone,
            "q " + num(est.q, 6) + " <= 1/(1+c) " + num(est.bound, 6) + " (c " + num(est.c)
                + ", " + std::to_string(est.ratios_used) + " ratios), monotone "
                + (est.monotone ? "yes" : "no")};
}

// ---------------------------------------------------------------- 9
#ifndef SPRSM_BENCH_PATH
#define SPRSM_BENCH_PATH ""
#endif

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome determinism()
{
    bench::SweepConfig cfg;
    cfg.n = 200;
    cfg.seeds = {1, 2};
    cfg.alpha_grid = bench::GridAxis{0.0, 1.2, 3}.values();
    cfg.gamma_grid = bench::GridAxis{0.2, 1.4, 3}.values();
    cfg.workers = 3;
    const std::string a = bench::strip_last_column(bench::sweep_csv(bench::run_sweep(cfg)));
    const std::string b = bench::strip_last_column(bench::sweep_csv(bench::run_sweep(cfg)));

    bench::ComparisonConfig cc;
    cc.prox_kind = lasso::ProxKind::Indef;
    cc.sizes = {{200, 0.2}};
    cc.workers = 2;
    const std::string c =
        bench::strip_last_column(bench::comparison_csv(bench::run_comparison(cc)));
    const std::string d =
        bench::strip_last_column(bench::comparison_csv(bench::run_comparison(cc)));
    bool ok = a == b && c == d;
    std::string detail = std::string("sweep ") + (a == b ? "identical" : "DIFFERS")
                         + ", comparison " + (c == d ? "identical" : "DIFFERS");

    const std::string exe = SPRSM_BENCH_PATH;
    if (!exe.empty())
    {
        std::string out[2];
        for (int i = 0; i < 2; ++i)
        {
            const std::string path = "acceptance_cli_" + std::to_string(i) + ".csv";
            const std::string cmd = exe + " --n 200 --seeds 2 --grid 0:1.618:4,0:1.618:4 --out "
                                    + path + " > /dev/null";
            if (std::system(cmd.c_str()) != 0)
            {
                ok = false;
            }
            out[i] = bench::strip_last_column(slurp(path));
        }
        const bool same = !out[0].empty() && out[0] == out[1];
        ok = ok && same;
        detail += std::string(", CLI ") + (same ? "identical" : "DIFFERS");
    }
    return {ok, detail};
}

}  // namespace

int main()
{
    struct Criterion
    {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "matrix identities", matrix_identities},
        {2, "special-case equivalence", special_cases},
        {3, "contraction audit", contraction},
        {4, "nonergodic audit", nonergodic},
        {5, "ergodic audit", ergodic},
        {6, "sweep table shape and counts", table1},
        {7, "comparison ratios", tables234},
        {8, "linear rate", linear_rate},
        {9, "determinism", determinism},
    };

    int failures = 0;
    std::vector<std::string> lines;
    for (const Criterion& c : criteria)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[96];
        std::snprintf(buf, sizeof buf, "criterion %d %-30s %s  [%.1fs]  ", c.id, c.name,
                      o.passed ? "PASS" : "FAIL", secs);
        lines.push_back(buf + o.detail);
        std::cout << lines.back() << std::endl;
        failures += !o.passed;
    }
    std::cout << "\nsummary\n";
    for (const auto& l : lines)
        std::cout << l << '\n';
    return failures == 0 ? 0 : 1;
}
