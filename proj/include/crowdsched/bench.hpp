#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowdsched/data.hpp"
#include "crowdsched/lp.hpp"
#include "crowdsched/online.hpp"

namespace crowdsched {

enum class Algorithm { LrfMax, LrfMin, LrfMean, Edts, Rts, Dts };

std::string_view to_string(Algorithm a);
/// Accepts the printed names, case-insensitively. Throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);
/// Comma separated list; "all" expands to every algorithm.
std::vector<Algorithm> parse_algorithms(std::string_view list);
std::vector<Algorithm> all_algorithms();

/// One algorithm on one instance. Column order of the CSV follows the
/// field order.
struct RunRecord {
  std::string instance_id;
  std::string algorithm;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double wct = 0.0;
  double lp_bound = 0.0;
  double wctr = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";  // "failed: <reason>" when the instance could not be solved

  bool ok() const { return status == "ok"; }
};

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
/// Throws ParseError (with line) on a wrong header or malformed row.
std::vector<RunRecord> read_records_csv(std::istream& in);

/// Per-step EDTS potential check for one benchmark run.
struct PotentialCheck {
  std::string instance_id;
  double max_step_increase = 0.0;  // largest Psi_{k+1} - Psi_k, relative to Psi_k
  double terminal_gap = 0.0;       // |WCT - Psi_n| / WCT
};

struct BenchOptions {
  SyntheticConfig config;  // config.seed is the master seed
  std::vector<Algorithm> algorithms = all_algorithms();
  std::size_t seeds = 30;
  double epsilon = 3.0;
  IntervalObjective objective = IntervalObjective::MeanBusy;
  std::size_t rts_samples = 50;
  bool record_runtime = true;  // false writes 0 so reruns are byte-identical
  std::string id_prefix = "s";
};

/// Seed of the k-th benchmark instance below the master seed.
std::uint64_t instance_seed(std::uint64_t master, std::size_t k);

/// All algorithms on one instance against its interval-LP bound. An LP
/// failure marks every record of the instance failed.
std::vector<RunRecord> run_instance(const Instance& instance, const std::string& id, std::uint64_t seed,
                                    const BenchOptions& options, PotentialCheck* check = nullptr);

/// options.seeds instances generated from the config.
std::vector<RunRecord> run_bench(const BenchOptions& options, std::vector<PotentialCheck>* checks = nullptr);

struct SummaryRow {
  std::string algorithm;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double mean_wctr = 0.0;
  double std_wctr = 0.0;  // sample standard deviation, 0 for a single run
  double mean_runtime_ms = 0.0;
};

/// Successful records grouped by algorithm, in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// `param:lo:hi:step`, inclusive of hi up to rounding.
struct Sweep {
  std::string param;
  std::vector<double> values;
};
Sweep parse_sweep(std::string_view text);
/// Sets one config field: m, tasks_per_worker, alpha_mean, alpha_std,
/// phi_lo, phi_hi, beta_lo, beta_hi, gamma_lo, gamma_hi, weight_hi.
void apply_param(SyntheticConfig& config, std::string_view param, double value);
/// File stem for one sweep point, e.g. runs_gamma_lo_1.9.
std::string sweep_stem(std::string_view param, double value);
std::string format_number(double v);

/// Online runs: simulated meetings plus CosMOS per instance.
struct OnlineRecord {
  std::string instance_id;
  std::string offline;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double realized_wct = 0.0;
  double lp_bound = 0.0;
  double wctr = 0.0;
  std::size_t steps = 0;
  std::size_t guard_fired = 0;
  std::size_t unfinished = 0;
  std::size_t late_feedback = 0;
  std::string status = "ok";
};

struct OnlineStepRecord {
  std::string instance_id;
  std::size_t step = 0;
  CosmosStep data;
};

struct OnlineOptions {
  SyntheticConfig config;
  std::string offline = "LRF-MIN";  // any algorithm name except RTS and DTS, or "LRF"
  std::size_t seeds = 30;
  double horizon = 0.0;  // 0: 20 * (max phi) * (tasks per worker + 1)
  double epsilon = 3.0;
  CosmosOptions cosmos;
};

OfflinePlanner make_planner(std::string_view name, double epsilon);
std::vector<OnlineRecord> run_online(const OnlineOptions& options, std::vector<OnlineStepRecord>* steps = nullptr);
void write_online_csv(std::ostream& out, const std::vector<OnlineRecord>& records);
void write_online_steps_csv(std::ostream& out, const std::vector<OnlineStepRecord>& steps);

/// Mean +- std WCTR per algorithm over the points of one sweep.
struct Chart {
  std::string param;
  std::vector<double> xs;
  std::vector<std::string> series;
  std::vector<std::vector<double>> mean;  // [series][point], NaN when missing
  std::vector<std::vector<double>> sd;
};

/// One chart from (x, records) points; series in first-appearance order.
Chart build_chart(std::string param, const std::vector<std::pair<double, std::vector<RunRecord>>>& points);

/// Charts from the runs*.csv files of a results directory: one per swept
/// parameter (files runs_<param>_<value>.csv), and for runs.csv one over
/// n/m. Empty when nothing is found.
std::vector<Chart> load_charts(const std::filesystem::path& dir);
std::string render_svg(const Chart& chart);
std::string render_table(const std::vector<Chart>& charts);

}  // namespace crowdsched
