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
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sprsm/lasso.hpp"
#include "sprsm/solver.hpp"

namespace sprsm::bench
{
/// steps equal intervals of [lo, hi], i.e. steps + 1 points.
struct GridAxis
{
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;

    std::vector<double> values() const;
};

/// "lo:hi:steps,lo:hi:steps" (alpha axis first). Throws std::invalid_argument.
std::pair<GridAxis, GridAxis> parse_grid(const std::string& text);

struct SweepConfig
{
    int n = 2000;
    double p = 0.2;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> alpha_grid;
    std::vector<double> gamma_grid;
    DomainMode domain_mode = DomainMode::Extended;
    lasso::ProxKind prox_kind = lasso::ProxKind::Zero;
    double beta = 1.0;
    double tol = 1e-6;
    int max_iters = 1000;
    std::string output_path;
    /// 0 picks the hardware concurrency.
    int workers = 0;

    /// Throws std::invalid_argument on empty grids or seeds and bad values.
    void validate() const;
};

/// The 11 x 11 grid over [0, 1.618]^2 used for the sweep table.
SweepConfig table1_config();

struct RunResult
{
    double alpha = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    int iters = 0;
    StopReason stop_reason = StopReason::MaxIters;
    double final_residual = 0.0;
    double wall_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct SweepCell
{
    double alpha = 0.0;
    double gamma = 0.0;
    bool accepted = false;
    std::string reason;  // rejection or failure reason
    std::vector<RunResult> runs;  // seed order
    double mean_iters = 0.0;
    bool failed = false;

    long rounded_mean() const;
};

/// cells are row-major with gamma along rows and alpha along columns.
struct SweepResult
{
    SweepConfig config;
    std::vector<SweepCell> cells;

    const SweepCell& at(std::size_t gamma_index, std::size_t alpha_index) const;
    bool any_failed() const;
};

/// Instances are generated once per seed and shared by every cell.
SweepResult run_sweep(const SweepConfig& config);

struct ComparisonConfig
{
    lasso::ProxKind prox_kind = lasso::ProxKind::Zero;
    std::vector<std::pair<int, double>> sizes{{2000, 0.2}};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double beta = 1.0;
    double tol = 1e-6;
    int max_iters = 1000;
    int workers = 0;

    void validate() const;
};

enum class Method
{
    ADMM1,
    ADMM2,
    SPPRSMStar
};

std::string to_string(Method m);
SolverParams method_params(Method m);

struct MethodRun
{
    int n = 0;
    double p = 0.0;
    Method method = Method::ADMM1;
    RunResult run;
};

struct ComparisonRow
{
    int n = 0;
    double p = 0.0;
    /// 5-seed (or however many) means.
    double iters_admm1 = 0.0;
    double iters_admm2 = 0.0;
    double iters_spprsm_star = 0.0;
    /// 100 * star / admm, rounded to one decimal.
    double ratio1 = 0.0;
    double ratio2 = 0.0;
    std::vector<int> seeds_admm1;
    std::vector<int> seeds_admm2;
    std::vector<int> seeds_spprsm_star;
    bool failed = false;
    std::string reason;
};

struct ComparisonResult
{
    ComparisonConfig config;
    std::vector<ComparisonRow> rows;
    /// Every solve, ordered by size, then method, then seed.
    std::vector<MethodRun> runs;

    bool any_failed() const;
};

ComparisonResult run_comparison(const ComparisonConfig& config);

double round1(double v);

/// Header alpha,gamma,seed,iters,stop_reason,final_residual,wall_ms. Rejected
/// cells get one row per seed with "--" in the numeric columns.
/// Throws std::invalid_argument on an empty result.
std::string sweep_csv(const SweepResult& result);
/// Same columns prefixed by n,p,prox,method.
std::string comparison_csv(const ComparisonResult& result);

/// Writes text to path; throws std::runtime_error if the file cannot be written.
void write_file(const std::string& path, const std::string& text);

/// Aligned table, gamma rows by alpha columns, rounded means or "--".
std::string sweep_table(const SweepResult& result);
std::string comparison_table(const ComparisonResult& result);

struct CsvRow
{
    double alpha = 0.0;
    double gamma = 0.0;
    std::uint64_t seed = 0;
    std::optional<int> iters;  // empty for "--"
    std::string stop_reason;
    std::string final_residual;
    std::string wall_ms;
};

/// Parses sweep_csv output. Throws std::invalid_argument on malformed text.
std::vector<CsvRow> parse_sweep_csv(const std::string& text);

/// Drops the last column of every line, for determinism comparisons.
std::string strip_last_column(const std::string& csv);

}  // namespace sprsm::bench
