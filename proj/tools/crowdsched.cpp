// Command-line driver: instance generation, trace ingestion, offline and
// online benchmarks, reports, and LP export.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "crowdsched/bench.hpp"
#include "crowdsched/data.hpp"
#include "crowdsched/instance_io.hpp"
#include "crowdsched/lp.hpp"

namespace fs = std::filesystem;
using namespace crowdsched;

namespace {

void setup_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("CROWDSCHED_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only accept it when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("ignoring CROWDSCHED_LOG={}", env);
  }
}

SyntheticConfig config_or_default(const std::string& path) {
  return path.empty() ? SyntheticConfig{} : load_config(path);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_summary(const fs::path& path, const std::vector<RunRecord>& rows) {
  auto out = open_out(path);
  const auto summary = summarize(rows);
  write_summary_csv(out, summary);
  for (const auto& s : summary)
    spdlog::info("{:>9}  runs {:>3}  failed {:>2}  WCTR {:.4f} +- {:.4f}", s.algorithm, s.runs, s.failed, s.mean_wctr,
                 s.std_wctr);
}

struct BenchArgs {
  std::string config, algos = "all", sweep, out = "results", trace, objective = "mean-busy";
  std::size_t seeds = 30, top_k = 128, rts_samples = 50;
  double epsilon = 3.0;
  bool no_timing = false;
};

std::vector<RunRecord> bench_trace(const BenchOptions& options, const TraceStats& stats) {
  std::vector<RunRecord> rows;
  for (std::size_t k = 0; k < options.seeds; ++k) {
    auto tasks = options.config;
    tasks.seed = instance_seed(options.config.seed, k);
    const auto inst = instance_from_trace(stats, tasks);
    auto r = run_instance(inst, "t" + std::to_string(k), tasks.seed, options);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

void cmd_bench(const BenchArgs& a) {
  BenchOptions o;
  o.config = config_or_default(a.config);
  o.algorithms = parse_algorithms(a.algos);
  o.seeds = a.seeds;
  o.epsilon = a.epsilon;
  o.objective = parse_interval_objective(a.objective);
  o.rts_samples = a.rts_samples;
  o.record_runtime = !a.no_timing;

  std::optional<TraceStats> stats;
  if (!a.trace.empty()) {
    stats = ingest_trace(load_contacts(a.trace), a.top_k);
    for (const auto& w : stats->warnings) spdlog::warn("{}", w);
    spdlog::info("trace: {} workers kept of {} eligible", stats->workers.size(), stats->eligible);
  }
  auto run = [&](const BenchOptions& opt) { return stats ? bench_trace(opt, *stats) : run_bench(opt); };
  const fs::path out = a.out;

  if (a.sweep.empty()) {
    spdlog::info("bench: {} seeds, {} algorithms", o.seeds, o.algorithms.size());
    const auto rows = run(o);
    auto f = open_out(out / "runs.csv");
    write_records_csv(f, rows);
    write_summary(out / "summary.csv", rows);
    return;
  }
  const auto sweep = parse_sweep(a.sweep);
  for (double v : sweep.values) {
    auto point = o;
    apply_param(point.config, sweep.param, v);
    spdlog::info("sweep {} = {}", sweep.param, format_number(v));
    const auto rows = run(point);
    const auto stem = sweep_stem(sweep.param, v);
    auto f = open_out(out / (stem + ".csv"));
    write_records_csv(f, rows);
    write_summary(out / ("summary" + stem.substr(4) + ".csv"), rows);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Task scheduling for unrelated crowd workers: benchmarks and tools"};
  app.require_subcommand(1);

  // generate
  std::string gen_config, gen_out = "instance.json";
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("generate", "Write one synthetic instance as JSON");
  gen->add_option("--config", gen_config, "Synthetic config (JSON)");
  gen->add_option("--seed", gen_seed, "Override the config seed");
  gen->add_option("--out", gen_out, "Output file");

  // bench
  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run the offline algorithms against the LP bound");
  bench->add_option("--config", bench_args.config, "Synthetic config (JSON); defaults when omitted");
  bench->add_option("--algos", bench_args.algos, "Comma separated: LRF-MAX,LRF-MIN,LRF-MEAN,EDTS,RTS,DTS or all");
  bench->add_option("--seeds", bench_args.seeds, "Instances per point")->check(CLI::PositiveNumber);
  bench->add_option("--sweep", bench_args.sweep, "param:lo:hi:step");
  bench->add_option("--epsilon", bench_args.epsilon, "Interval growth factor for the LP");
  bench->add_option("--lp-objective", bench_args.objective, "mean-busy or literal");
  bench->add_option("--out", bench_args.out, "Output directory");
  bench->add_option("--trace", bench_args.trace, "Contact trace; workers come from it instead of the config");
  bench->add_option("--top-k", bench_args.top_k, "Workers kept from the trace");
  bench->add_option("--rts-samples", bench_args.rts_samples, "Rounding seeds averaged for RTS")->check(CLI::PositiveNumber);
  bench->add_flag("--no-timing", bench_args.no_timing, "Write runtime_ms = 0 for byte-identical reruns");

  // online
  OnlineOptions online_opts;
  std::string online_config, online_out = "results";
  bool no_guard = false;
  auto* online = app.add_subcommand("online", "Simulate meetings and run CosMOS");
  online->add_option("--config", online_config, "Synthetic config (JSON)");
  online->add_option("--offline", online_opts.offline, "LRF, LRF-MAX, LRF-MIN, LRF-MEAN or EDTS");
  online->add_option("--seeds", online_opts.seeds, "Runs")->check(CLI::PositiveNumber);
  online->add_option("--horizon", online_opts.horizon, "Trace length; 0 picks one from the instance");
  online->add_option("--epsilon", online_opts.epsilon, "Interval growth factor for the LP");
  online->add_option("--out", online_out, "Output directory");
  online->add_flag("--no-guard", no_guard, "Always follow the re-plan, even when worse than the previous one");

  // ingest
  std::string trace_path, ingest_out = "stats.csv";
  std::size_t top_k = 128;
  auto* ingest = app.add_subcommand("ingest", "Estimate per-device meeting rates from a contact trace");
  ingest->add_option("--trace", trace_path, "Contact trace: device_id start end per line")->required();
  ingest->add_option("--top-k", top_k, "Devices kept");
  ingest->add_option("--out", ingest_out, "Output CSV");

  // report
  std::string report_dir = "results", report_out;
  auto* report = app.add_subcommand("report", "SVG charts and a text table from bench results");
  report->add_option("--results", report_dir, "Directory with runs*.csv");
  report->add_option("--out", report_out, "Output directory (defaults to --results)");

  // lp
  auto* lp = app.add_subcommand("lp", "Interval-indexed LP of an instance");
  lp->require_subcommand(1);
  std::string lp_instance, lp_out = "model.lp", lp_objective = "mean-busy";
  double lp_eps = 3.0;
  auto* lp_export = lp->add_subcommand("export", "Write the LP in CPLEX LP format");
  auto* lp_solve = lp->add_subcommand("solve", "Print the LP optimum");
  for (auto* sub : {lp_export, lp_solve}) {
    sub->add_option("--instance", lp_instance, "Instance JSON")->required();
    sub->add_option("--epsilon", lp_eps, "Interval growth factor");
    sub->add_option("--lp-objective", lp_objective, "mean-busy or literal");
  }
  lp_export->add_option("--out", lp_out, "Output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto c = config_or_default(gen_config);
      if (gen_seed) c.seed = *gen_seed;
      const auto inst = generate(c);
      auto out = open_out(gen_out);
      write_instance(out, inst);
      spdlog::info("wrote {} ({} workers, {} tasks)", gen_out, inst.workers(), inst.tasks());
    } else if (*bench) {
      cmd_bench(bench_args);
    } else if (*online) {
      online_opts.config = config_or_default(online_config);
      online_opts.cosmos.monotone_guard = !no_guard;
      std::vector<OnlineStepRecord> steps;
      const auto rows = run_online(online_opts, &steps);
      const fs::path out = online_out;
      auto f = open_out(out / "online.csv");
      write_online_csv(f, rows);
      auto g = open_out(out / "online_steps.csv");
      write_online_steps_csv(g, steps);
      std::size_t flagged = 0, fired = 0;
      for (const auto& r : rows) {
        flagged += r.status != "ok";
        fired += r.guard_fired;
      }
      spdlog::info("online: {} runs, {} flagged, guard kept the previous plan {} times", rows.size(), flagged, fired);
    } else if (*ingest) {
      const auto stats = ingest_trace(load_contacts(trace_path), top_k);
      for (const auto& w : stats.warnings) spdlog::warn("{}", w);
      auto out = open_out(ingest_out);
      out << "device,contacts,total_gap,lambda,phi\n";
      for (const auto& w : stats.workers)
        out << w.device << ',' << w.contacts << ',' << format_number(w.total_gap) << ','
            << format_number(w.lambda) << ',' << format_number(w.phi) << '\n';
      spdlog::info("kept {} of {} eligible devices", stats.workers.size(), stats.eligible);
    } else if (*report) {
      const auto charts = load_charts(report_dir);
      if (charts.empty()) {
        spdlog::info("no results in {}", report_dir);
        return 0;
      }
      const fs::path out = report_out.empty() ? fs::path(report_dir) : fs::path(report_out);
      for (const auto& c : charts) {
        std::string name = c.param == "n/m" ? "tasks_per_worker" : c.param;
        auto f = open_out(out / ("wctr_" + name + ".svg"));
        f << render_svg(c);
      }
      const auto table = render_table(charts);
      auto t = open_out(out / "report.txt");
      t << table;
      std::cout << table;
    } else if (*lp_export || *lp_solve) {
      const auto inst = load_instance(lp_instance);
      const auto model = build_interval_indexed(inst, lp_eps, parse_interval_objective(lp_objective));
      if (*lp_export) {
        auto out = open_out(lp_out);
        export_model(out, model.program);
        spdlog::info("wrote {} ({} variables)", lp_out, model.vars.size());
      } else {
        const auto res = solve(model);
        if (res.status != SolveStatus::Optimal) throw std::runtime_error("LP is not optimal");
        std::cout << format_number(res.solution.objective()) << '\n';
      }
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
