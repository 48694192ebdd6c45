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

#include "sprsm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sprsm::bench
{
namespace
{
int resolve_workers(int requested, std::size_t tasks)
{
    int w = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(w, 1);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w),
                                                  std::max<std::size_t>(tasks, 1)));
}

// Runs fn(0..count-1) on a bounded pool. fn must not throw.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn)
{
    const int w = resolve_workers(workers, count);
    if (w == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                fn(i);
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
}

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Per-seed material shared by all cells of a sweep or rows of a comparison.
struct SeedContext
{
    std::shared_ptr<const lasso::LassoInstance> inst;
    SplitProblem problem;
    ProxMatrix S;
    std::string error;
};

SeedContext make_context(int n, double p, std::uint64_t seed, lasso::ProxKind kind, double beta)
{
    SeedContext ctx;
    try
    {
        ctx.inst = std::make_shared<const lasso::LassoInstance>(
            lasso::generate_instance(n, p, seed));
        ctx.problem = lasso::make_split_problem(ctx.inst);
        ctx.S = lasso::make_prox_spec(*ctx.inst, beta, kind).S;
    }
    catch (const std::exception& e)
    {
        ctx.error = e.what();
    }
    return ctx;
}

RunResult run_one(const SeedContext& ctx,
                  SolverParams params,
                  double beta,
                  double tol,
                  int max_iters,
                  std::uint64_t seed)
{
    RunResult out;
    out.alpha = params.alpha;
    out.gamma = params.gamma;
    out.seed = seed;
    if (!ctx.error.empty())
    {
        out.failed = true;
        out.error = ctx.error;
        return out;
    }
    params.beta = beta;
    params.tol = tol;
    params.max_iters = max_iters;
    params.stop_rule = StopRule::Cheap;
    params.snapshot_stride = 0;
    params.S = ctx.S;
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        const RunRecord rec = solve(ctx.problem, params);
        out.iters = rec.iterations;
        out.stop_reason = rec.stop_reason;
        out.final_residual = rec.residual_norms.empty() ? 0.0 : rec.residual_norms.back();
    }
    catch (const std::exception& e)
    {
        out.failed = true;
        out.error = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

std::vector<SeedContext> make_contexts(int n,
                                       double p,
                                       const std::vector<std::uint64_t>& seeds,
                                       lasso::ProxKind kind,
                                       double beta,
                                       int workers)
{
    std::vector<SeedContext> ctx(seeds.size());
    parallel_for(seeds.size(), workers,
                 [&](std::size_t i) { ctx[i] = make_context(n, p, seeds[i], kind, beta); });
    return ctx;
}

void check_common(int n, double p, const std::vector<std::uint64_t>& seeds,
                  double beta, double tol, int max_iters)
{
    if (n < 2 || n % 2 != 0)
    {
        throw std::invalid_argument("n must be even and >= 2, got " + std::to_string(n));
    }
    if (!(p > 0.0 && p <= 1.0))
    {
        throw std::invalid_argument("p must lie in (0, 1]");
    }
    if (seeds.empty())
    {
        throw std::invalid_argument("no seeds given");
    }
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("beta must be positive");
    }
    if (!(tol > 0.0))
    {
        throw std::invalid_argument("tol must be positive");
    }
    if (max_iters < 1)
    {
        throw std::invalid_argument("max_iters must be positive");
    }
}

std::string row_suffix(const RunResult& r)
{
    std::string s = std::to_string(r.seed) + ",";
    if (r.failed)
    {
        return s + "--,failed,--," + fmt("%.3f", r.wall_ms);
    }
    return s + std::to_string(r.iters) + "," + to_string(r.stop_reason) + ","
           + fmt("%.6e", r.final_residual) + "," + fmt("%.3f", r.wall_ms);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
    {
        out.push_back(cur);
    }
    if (!s.empty() && s.back() == sep)
    {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s, const char* what)
{
    std::size_t pos = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &pos);
    }
    catch (const std::exception&)
    {
        pos = 0;
    }
    if (pos == 0 || pos != s.size())
    {
        throw std::invalid_argument(std::string("bad ") + what + ": '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<double> GridAxis::values() const
{
    if (steps < 0)
    {
        throw std::invalid_argument("grid steps must be nonnegative");
    }
    if (steps == 0)
    {
        return {lo};
    }
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
    {
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / steps;
    }
    return v;
}

std::pair<GridAxis, GridAxis> parse_grid(const std::string& text)
{
    const auto axes = split(text, ',');
    if (axes.size() != 2)
    {
        throw std::invalid_argument("grid must be 'lo:hi:steps,lo:hi:steps', got '"
                                    + text + "'");
    }
    auto one = [&](const std::string& a) {
        const auto parts = split(a, ':');
        if (parts.size() != 3)
        {
            throw std::invalid_argument("grid axis must be lo:hi:steps, got '" + a + "'");
        }
        GridAxis g;
        g.lo = parse_double(parts[0], "grid lo");
        g.hi = parse_double(parts[1], "grid hi");
        const double steps = parse_double(parts[2], "grid steps");
        if (steps < 0 || steps != std::floor(steps) || steps > 10000)
        {
            throw std::invalid_argument("grid steps must be a small nonnegative integer");
        }
        g.steps = static_cast<int>(steps);
        if (g.hi < g.lo)
        {
            throw std::invalid_argument("grid axis has hi < lo");
        }
        return g;
    };
    return {one(axes[0]), one(axes[1])};
}

void SweepConfig::validate() const
{
    if (alpha_grid.empty() || gamma_grid.empty())
    {
        throw std::invalid_argument("empty (alpha, gamma) grid");
    }
    check_common(n, p, seeds, beta, tol, max_iters);
}

SweepConfig table1_config()
{
    SweepConfig c;
    const GridAxis axis{0.0, 1.618, 10};
    c.alpha_grid = axis.values();
    c.gamma_grid = axis.values();
    c.domain_mode = DomainMode::Extended;
    return c;
}

long SweepCell::rounded_mean() const
{
    return std::lround(mean_iters);
}

const SweepCell& SweepResult::at(std::size_t gamma_index, std::size_t alpha_index) const
{
    return cells.at(gamma_index * config.alpha_grid.size() + alpha_index);
}

bool SweepResult::any_failed() const
{
    return std::any_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.failed; });
}

SweepResult run_sweep(const SweepConfig& config)
{
    config.validate();
    SweepResult result;
    result.config = config;
    const std::size_t na = config.alpha_grid.size();
    const std::size_t ng = config.gamma_grid.size();
    result.cells.resize(na * ng);
    for (std::size_t gi = 0; gi < ng; ++gi)
    {
        for (std::size_t ai = 0; ai < na; ++ai)
        {
            SweepCell& cell = result.cells[gi * na + ai];
            cell.alpha = config.alpha_grid[ai];
            cell.gamma = config.gamma_grid[gi];
            const Validation v = validate_params(cell.alpha, cell.gamma, config.domain_mode);
            cell.accepted = static_cast<bool>(v);
            if (!cell.accepted)
            {
                cell.reason = v.reason;
            }
            cell.runs.resize(config.seeds.size());
        }
    }

    const bool any_accepted = std::any_of(result.cells.begin(), result.cells.end(),
                                          [](const SweepCell& c) { return c.accepted; });
    if (!any_accepted)
    {
        return result;
    }

    const auto contexts = make_contexts(config.n, config.p, config.seeds,
                                        config.prox_kind, config.beta, config.workers);
    const std::size_t ns = config.seeds.size();
    parallel_for(result.cells.size() * ns, config.workers, [&](std::size_t task) {
        SweepCell& cell = result.cells[task / ns];
        const std::size_t s = task % ns;
        if (!cell.accepted)
        {
            return;
        }
        SolverParams params;
        params.alpha = cell.alpha;
        params.gamma = cell.gamma;
        params.domain_mode = config.domain_mode;
        cell.runs[s] = run_one(contexts[s], params, config.beta, config.tol,
                               config.max_iters, config.seeds[s]);
    });

    for (SweepCell& cell : result.cells)
    {
        if (!cell.accepted)
        {
            for (std::size_t s = 0; s < ns; ++s)
            {
                cell.runs[s].alpha = cell.alpha;
                cell.runs[s].gamma = cell.gamma;
                cell.runs[s].seed = config.seeds[s];
            }
            continue;
        }
        double sum = 0.0;
        for (const RunResult& r : cell.runs)
        {
            if (r.failed)
            {
                cell.failed = true;
                cell.reason = r.error;
            }
            sum += r.iters;
        }
        cell.mean_iters = sum / static_cast<double>(ns);
    }
    return result;
}

void ComparisonConfig::validate() const
{
    if (sizes.empty())
    {
        throw std::invalid_argument("no (n, p) sizes given");
    }
    for (const auto& [n, p] : sizes)
    {
        check_common(n, p, seeds, beta, tol, max_iters);
    }
}

std::string to_string(Method m)
{
    switch (m)
    {
        case Method::ADMM1:
            return "admm1";
        case Method::ADMM2:
            return "admm2";
        case Method::SPPRSMStar:
            return "spprsm_star";
    }
    return "?";
}

SolverParams method_params(Method m)
{
    switch (m)
    {
        case Method::ADMM1:
            return reduce_to(NamedMethod::ADMM1);
        case Method::ADMM2:
            return reduce_to(NamedMethod::ADMM2);
        case Method::SPPRSMStar:
        {
            SolverParams p;
            p.alpha = 0.618;
            p.gamma = 1.0;
            return p;
        }
    }
    throw std::invalid_argument("unknown method");
}

bool ComparisonResult::any_failed() const
{
    return std::any_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.failed; });
}

double round1(double v)
{
    return std::round(v * 10.0) / 10.0;
}

ComparisonResult run_comparison(const ComparisonConfig& config)
{
    config.validate();
    ComparisonResult result;
    result.config = config;
    const Method methods[] = {Method::ADMM1, Method::ADMM2, Method::SPPRSMStar};
    const std::size_t ns = config.seeds.size();

    for (const auto& [n, p] : config.sizes)
    {
        const auto contexts =
            make_contexts(n, p, config.seeds, config.prox_kind, config.beta, config.workers);
        std::vector<MethodRun> runs(3 * ns);
        parallel_for(runs.size(), config.workers, [&](std::size_t task) {
            const Method m = methods[task / ns];
            const std::size_t s = task % ns;
            runs[task].n = n;
            runs[task].p = p;
            runs[task].method = m;
            runs[task].run = run_one(contexts[s], method_params(m), config.beta,
                                     config.tol, config.max_iters, config.seeds[s]);
        });

        ComparisonRow row;
        row.n = n;
        row.p = p;
        std::vector<int>* per_method[] = {&row.seeds_admm1, &row.seeds_admm2,
                                          &row.seeds_spprsm_star};
        double* means[] = {&row.iters_admm1, &row.iters_admm2, &row.iters_spprsm_star};
        for (std::size_t mi = 0; mi < 3; ++mi)
        {
            double sum = 0.0;
            for (std::size_t s = 0; s < ns; ++s)
            {
                const RunResult& r = runs[mi * ns + s].run;
                if (r.failed && !row.failed)
                {
                    row.failed = true;
                    row.reason = to_string(methods[mi]) + " seed "
                                 + std::to_string(r.seed) + ": " + r.error;
                }
                per_method[mi]->push_back(r.iters);
                sum += r.iters;
            }
            *means[mi] = sum / static_cast<double>(ns);
        }
        if (row.iters_admm1 > 0.0)
        {
            row.ratio1 = round1(100.0 * row.iters_spprsm_star / row.iters_admm1);
        }
        if (row.iters_admm2 > 0.0)
        {
            row.ratio2 = round1(100.0 * row.iters_spprsm_star / row.iters_admm2);
        }
        result.rows.push_back(std::move(row));
        result.runs.insert(result.runs.end(), runs.begin(), runs.end());
    }
    return result;
}

std::string sweep_csv(const SweepResult& result)
{
    if (result.cells.empty())
    {
        throw std::invalid_argument("nothing to write: empty sweep");
    }
    std::string out = "alpha,gamma,seed,iters,stop_reason,final_residual,wall_ms\n";
    for (const SweepCell& cell : result.cells)
    {
        const std::string ag = fmt("%.6f", cell.alpha) + "," + fmt("%.6f", cell.gamma) + ",";
        for (const RunResult& r : cell.runs)
        {
            if (!cell.accepted)
            {
                out += ag + std::to_string(r.seed) + ",--,out_of_domain,--,0.000\n";
            }
            else
            {
                out += ag + row_suffix(r) + "\n";
            }
        }
    }
    return out;
}

std::string comparison_csv(const ComparisonResult& result)
{
    if (result.runs.empty())
    {
        throw std::invalid_argument("nothing to write: empty comparison");
    }
    std::string out =
        "n,p,prox,method,alpha,gamma,seed,iters,stop_reason,final_residual,wall_ms\n";
    const std::string prox = lasso::to_string(result.config.prox_kind);
    for (const MethodRun& m : result.runs)
    {
        out += std::to_string(m.n) + "," + fmt("%.3f", m.p) + "," + prox + ","
               + to_string(m.method) + "," + fmt("%.6f", m.run.alpha) + ","
               + fmt("%.6f", m.run.gamma) + "," + row_suffix(m.run) + "\n";
    }
    return out;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
    {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    os << text;
    os.flush();
    if (!os)
    {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::string sweep_table(const SweepResult& result)
{
    if (result.cells.empty())
    {
        throw std::invalid_argument("nothing to print: empty sweep");
    }
    const auto& ag = result.config.alpha_grid;
    const auto& gg = result.config.gamma_grid;
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-12s", "gamma/alpha");
    os << buf;
    for (double a : ag)
    {
        std::snprintf(buf, sizeof buf, "%8.3f", a);
        os << buf;
    }
    os << '\n';
    for (std::size_t gi = 0; gi < gg.size(); ++gi)
    {
        std::snprintf(buf, sizeof buf, "%-12.3f", gg[gi]);
        os << buf;
        for (std::size_t ai = 0; ai < ag.size(); ++ai)
        {
            const SweepCell& c = result.at(gi, ai);
            std::string v = !c.accepted ? "--" : c.failed ? "fail" : std::to_string(c.rounded_mean());
            std::snprintf(buf, sizeof buf, "%8s", v.c_str());
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::string comparison_table(const ComparisonResult& result)
{
    if (result.rows.empty())
    {
        throw std::invalid_argument("nothing to print: empty comparison");
    }
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%6s %5s %10s %10s %12s %10s %10s\n", "n", "p", "ADMM-1",
                  "ADMM-2", "sP-PRSM*", "ratio1(%)", "ratio2(%)");
    os << "prox = " << lasso::to_string(result.config.prox_kind) << ", "
       << result.config.seeds.size() << " seed(s), mean iterations\n"
       << buf;
    for (const ComparisonRow& r : result.rows)
    {
        if (r.failed)
        {
            std::snprintf(buf, sizeof buf, "%6d %5.2f  failed: ", r.n, r.p);
            os << buf << r.reason << '\n';
            continue;
        }
        std::snprintf(buf, sizeof buf, "%6d %5.2f %10.1f %10.1f %12.1f %10.1f %10.1f\n", r.n,
                      r.p, r.iters_admm1, r.iters_admm2, r.iters_spprsm_star, r.ratio1,
                      r.ratio2);
        os << buf;
    }
    return os.str();
}

std::vector<CsvRow> parse_sweep_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)
        || line != "alpha,gamma,seed,iters,stop_reason,final_residual,wall_ms")
    {
        throw std::invalid_argument("missing or unexpected CSV header");
    }
    std::vector<CsvRow> rows;
    while (std::getline(is, line))
    {
        if (line.empty())
        {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7)
        {
            throw std::invalid_argument("CSV row has " + std::to_string(f.size())
                                        + " fields: '" + line + "'");
        }
        CsvRow r;
        r.alpha = parse_double(f[0], "alpha");
        r.gamma = parse_double(f[1], "gamma");
        r.seed = std::stoull(f[2]);
        if (f[3] != "--")
        {
            r.iters = static_cast<int>(parse_double(f[3], "iters"));
        }
        r.stop_reason = f[4];
        r.final_residual = f[5];
        r.wall_ms = f[6];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string strip_last_column(const std::string& csv)
{
    std::istringstream is(csv);
    std::string line;
    std::string out;
    while (std::getline(is, line))
    {
        const auto pos = line.rfind(',');
        out += pos == std::string::npos ? line : line.substr(0, pos);
        out += '\n';
    }
    return out;
}

}  // namespace sprsm::bench
