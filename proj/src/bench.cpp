#include "crowdsched/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "crowdsched/lrf.hpp"
#include "crowdsched/random.hpp"
#include "crowdsched/rounding.hpp"

namespace crowdsched {

namespace {

constexpr const char* kRunHeader = "instance_id,algorithm,m,n,seed,wct,lp_bound,wctr,runtime_ms,status";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// CSV cells never contain separators or line breaks.
std::string cell(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  if (s == "nan") return kNaN;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
  return v;
}

template <class T>
T to_integer(const std::string& s, std::size_t line) {
  T v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return v.empty() ? kNaN : 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::LrfMax: return "LRF-MAX";
    case Algorithm::LrfMin: return "LRF-MIN";
    case Algorithm::LrfMean: return "LRF-MEAN";
    case Algorithm::Edts: return "EDTS";
    case Algorithm::Rts: return "RTS";
    case Algorithm::Dts: return "DTS";
  }
  return "?";
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::LrfMax, Algorithm::LrfMin, Algorithm::LrfMean, Algorithm::Edts, Algorithm::Rts, Algorithm::Dts};
}

Algorithm parse_algorithm(std::string_view name) {
  const auto key = lower(name);
  for (auto a : all_algorithms())
    if (lower(to_string(a)) == key) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::vector<Algorithm> parse_algorithms(std::string_view list) {
  if (lower(list) == "all") return all_algorithms();
  std::vector<Algorithm> out;
  for (const auto& part : split(std::string(list), ',')) {
    if (part.empty()) continue;
    const auto a = parse_algorithm(part);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  if (out.empty()) throw std::invalid_argument("no algorithms selected");
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kRunHeader << '\n';
  for (const auto& r : records)
    out << cell(r.instance_id) << ',' << cell(r.algorithm) << ',' << r.m << ',' << r.n << ',' << r.seed << ','
        << format_number(r.wct) << ',' << format_number(r.lp_bound) << ',' << format_number(r.wctr) << ','
        << format_number(r.runtime_ms) << ',' << cell(r.status) << '\n';
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunHeader) throw ParseError("unexpected CSV header", 1);
  std::vector<RunRecord> out;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ParseError("expected 10 fields", no);
    RunRecord r;
    r.instance_id = f[0];
    r.algorithm = f[1];
    r.m = to_integer<std::size_t>(f[2], no);
    r.n = to_integer<std::size_t>(f[3], no);
    r.seed = to_integer<std::uint64_t>(f[4], no);
    r.wct = to_double(f[5], no);
    r.lp_bound = to_double(f[6], no);
    r.wctr = to_double(f[7], no);
    r.runtime_ms = to_double(f[8], no);
    r.status = f[9];
    out.push_back(std::move(r));
  }
  return out;
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t k) { return derive_seed(master, {k}); }

std::vector<RunRecord> run_instance(const Instance& instance, const std::string& id, std::uint64_t seed,
                                    const BenchOptions& options, PotentialCheck* check) {
  std::vector<RunRecord> out;
  auto record = [&](Algorithm a) {
    RunRecord r;
    r.instance_id = id;
    r.algorithm = std::string(to_string(a));
    r.m = instance.workers();
    r.n = instance.tasks();
    r.seed = seed;
    return r;
  };

  const auto lp_start = std::chrono::steady_clock::now();
  LpSolveResult lp;
  std::string failure;
  try {
    lp = solve(build_interval_indexed(instance, options.epsilon, options.objective));
    if (lp.status != SolveStatus::Optimal) failure = "failed: LP not optimal";
    else if (!(lp.solution.objective() > 0.0)) failure = "failed: LP bound is not positive";
  } catch (const std::exception& e) {
    failure = std::string("failed: ") + e.what();
  }
  const double lp_ms = elapsed_ms(lp_start);
  if (!failure.empty()) {
    for (auto a : options.algorithms) {
      auto r = record(a);
      r.wct = r.lp_bound = r.wctr = kNaN;
      r.status = failure;
      out.push_back(std::move(r));
    }
    return out;
  }
  const double bound = lp.solution.objective();

  for (auto a : options.algorithms) {
    auto r = record(a);
    r.lp_bound = bound;
    const auto start = std::chrono::steady_clock::now();
    double extra_ms = 0.0;  // LP-based algorithms pay for the shared solve
    try {
      switch (a) {
        case Algorithm::LrfMax:
        case Algorithm::LrfMin:
        case Algorithm::LrfMean: {
          const auto v = a == Algorithm::LrfMax   ? LrfVariant::Max
                         : a == Algorithm::LrfMin ? LrfVariant::Min
                                                  : LrfVariant::Mean;
          r.wct = evaluate(instance, lrf_variant(instance, v)).wct;
          break;
        }
        case Algorithm::Edts: {
          DerandomizationTrace trace;
          const auto s = edts(lp.solution, instance, check ? &trace : nullptr);
          r.wct = evaluate(instance, s).wct;
          if (check) {
            check->instance_id = id;
            check->max_step_increase = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 1; k < trace.potential.size(); ++k)
              check->max_step_increase =
                  std::max(check->max_step_increase,
                           (trace.potential[k] - trace.potential[k - 1]) / std::abs(trace.potential[k - 1]));
            check->terminal_gap = std::abs(r.wct - trace.potential.back()) / r.wct;
          }
          extra_ms = lp_ms;
          break;
        }
        case Algorithm::Rts: {
          double total = 0.0;
          for (std::size_t k = 0; k < options.rts_samples; ++k)
            total += evaluate(instance, rts(lp.solution, instance, derive_seed(seed, {0x525453, k}))).wct;
          r.wct = total / static_cast<double>(options.rts_samples);
          extra_ms = lp_ms;
          break;
        }
        case Algorithm::Dts: {
          r.wct = evaluate(instance, dts(instance, build_groupings(lp.solution))).wct;
          extra_ms = lp_ms;
          break;
        }
      }
      r.wctr = r.wct / bound;
    } catch (const std::exception& e) {
      r.wct = r.wctr = kNaN;
      r.status = std::string("failed: ") + e.what();
    }
    r.runtime_ms = options.record_runtime ? elapsed_ms(start) + extra_ms : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> run_bench(const BenchOptions& options, std::vector<PotentialCheck>* checks) {
  options.config.validate();
  if (options.rts_samples == 0) throw std::invalid_argument("rts_samples must be positive");
  std::vector<RunRecord> out;
  for (std::size_t k = 0; k < options.seeds; ++k) {
    auto config = options.config;
    config.seed = instance_seed(options.config.seed, k);
    const auto instance = generate(config);
    PotentialCheck check;
    auto rows = run_instance(instance, options.id_prefix + std::to_string(k), config.seed, options,
                             checks ? &check : nullptr);
    if (checks && !check.instance_id.empty()) checks->push_back(check);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> wctr, runtime;
  for (const auto& r : records) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) { return s.algorithm == r.algorithm; });
    if (it == rows.end()) {
      rows.push_back({r.algorithm});
      wctr.emplace_back();
      runtime.emplace_back();
      it = rows.end() - 1;
    }
    const auto k = static_cast<std::size_t>(it - rows.begin());
    if (!r.ok()) {
      ++it->failed;
      continue;
    }
    ++it->runs;
    wctr[k].push_back(r.wctr);
    runtime[k].push_back(r.runtime_ms);
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].mean_wctr = mean_of(wctr[k]);
    rows[k].std_wctr = sd_of(wctr[k]);
    rows[k].mean_runtime_ms = mean_of(runtime[k]);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "algorithm,runs,failed,mean_wctr,std_wctr,mean_runtime_ms\n";
  for (const auto& r : rows)
    out << cell(r.algorithm) << ',' << r.runs << ',' << r.failed << ',' << format_number(r.mean_wctr) << ','
        << format_number(r.std_wctr) << ',' << format_number(r.mean_runtime_ms) << '\n';
}

Sweep parse_sweep(std::string_view text) {
  const auto parts = split(std::string(text), ':');
  if (parts.size() != 4) throw std::invalid_argument("sweep must be param:lo:hi:step");
  Sweep s;
  s.param = parts[0];
  double lo, hi, step;
  try {
    lo = to_double(parts[1], 0);
    hi = to_double(parts[2], 0);
    step = to_double(parts[3], 0);
  } catch (const ParseError&) {
    throw std::invalid_argument("sweep bounds must be numbers");
  }
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("sweep needs lo <= hi and step > 0");
  SyntheticConfig probe;
  apply_param(probe, s.param, lo);  // rejects unknown names and bad values
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    // Round away the accumulated binary noise (1.9 + 0.05 * 2 etc.).
    const double v = lo + static_cast<double>(k) * step;
    s.values.push_back(std::round(v * 1e9) / 1e9);
  }
  return s;
}

void apply_param(SyntheticConfig& c, std::string_view param, double value) {
  auto count = [&](const char* name) {
    if (value < 1.0 || value != std::floor(value)) throw std::invalid_argument(std::string(name) + " must be a positive integer");
    return static_cast<std::size_t>(value);
  };
  if (param == "m") c.m = count("m");
  else if (param == "tasks_per_worker" || param == "n/m") c.tasks_per_worker = count("tasks_per_worker");
  else if (param == "alpha_mean") c.alpha_mean = value;
  else if (param == "alpha_std") c.alpha_std = value;
  else if (param == "phi_lo") c.phi_total_range.lo = value;
  else if (param == "phi_hi") c.phi_total_range.hi = value;
  else if (param == "beta_lo") c.beta_range.lo = value;
  else if (param == "beta_hi") c.beta_range.hi = value;
  else if (param == "gamma_lo") c.gamma_range.lo = value;
  else if (param == "gamma_hi") c.gamma_range.hi = value;
  else if (param == "weight_hi") c.weight_range.hi = value;
  else throw std::invalid_argument("unknown sweep parameter '" + std::string(param) + "'");
}

std::string sweep_stem(std::string_view param, double value) {
  std::string p(param == "n/m" ? "tasks_per_worker" : param);
  return "runs_" + p + "_" + format_number(value);
}

OfflinePlanner make_planner(std::string_view name, double epsilon) {
  const auto key = lower(name);
  if (key == "lrf") return offline_lrf_identical();
  if (key == "lrf-max") return offline_lrf(LrfVariant::Max);
  if (key == "lrf-min") return offline_lrf(LrfVariant::Min);
  if (key == "lrf-mean") return offline_lrf(LrfVariant::Mean);
  if (key == "edts") return offline_edts(epsilon);
  throw std::invalid_argument("unknown offline algorithm '" + std::string(name) +
                              "' (LRF, LRF-MAX, LRF-MIN, LRF-MEAN, EDTS)");
}

std::vector<OnlineRecord> run_online(const OnlineOptions& options, std::vector<OnlineStepRecord>* steps) {
  options.config.validate();
  const auto planner = make_planner(options.offline, options.epsilon);
  std::vector<OnlineRecord> out;
  for (std::size_t k = 0; k < options.seeds; ++k) {
    auto config = options.config;
    config.seed = instance_seed(options.config.seed, k);
    const auto instance = generate(config);
    OnlineRecord r;
    r.instance_id = "o" + std::to_string(k);
    r.offline = options.offline;
    r.m = instance.workers();
    r.n = instance.tasks();
    r.seed = config.seed;
    double horizon = options.horizon;
    if (horizon <= 0.0) {
      const auto phis = instance.phis();
      horizon = 20.0 * *std::max_element(phis.begin(), phis.end()) *
                static_cast<double>(config.tasks_per_worker + 1);
    }
    try {
      const auto trace = simulate_meetings(instance, derive_seed(config.seed, {0x4d4545}), horizon);
      const auto res = cosmos(instance, trace, planner, options.cosmos);
      r.realized_wct = res.wct;
      r.steps = res.steps.size();
      r.unfinished = res.unfinished.size();
      r.late_feedback = res.late_feedback.size();
      for (std::size_t s = 0; s < res.steps.size(); ++s) {
        r.guard_fired += res.steps[s].kept_previous;
        if (steps) steps->push_back({r.instance_id, s, res.steps[s]});
      }
      r.lp_bound = lower_bound(instance, options.epsilon);
      r.wctr = r.realized_wct / r.lp_bound;
      if (r.unfinished > 0) r.status = "unfinished";
    } catch (const std::exception& e) {
      r.realized_wct = r.lp_bound = r.wctr = kNaN;
      r.status = std::string("failed: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_online_csv(std::ostream& out, const std::vector<OnlineRecord>& records) {
  out << "instance_id,offline,m,n,seed,realized_wct,lp_bound,wctr,steps,guard_fired,unfinished,late_feedback,status\n";
  for (const auto& r : records)
    out << cell(r.instance_id) << ',' << cell(r.offline) << ',' << r.m << ',' << r.n << ',' << r.seed << ','
        << format_number(r.realized_wct) << ',' << format_number(r.lp_bound) << ',' << format_number(r.wctr)
        << ',' << r.steps << ',' << r.guard_fired << ',' << r.unfinished << ',' << r.late_feedback << ','
        << cell(r.status) << '\n';
}

void write_online_steps_csv(std::ostream& out, const std::vector<OnlineStepRecord>& steps) {
  out << "instance_id,step,time,worker,remaining,committed,plan_value,inherited_value,kept_previous\n";
  for (const auto& s : steps)
    out << cell(s.instance_id) << ',' << s.step << ',' << format_number(s.data.time) << ',' << s.data.worker << ','
        << s.data.remaining << ',' << s.data.committed << ',' << format_number(s.data.plan_value) << ','
        << format_number(s.data.inherited_value) << ',' << (s.data.kept_previous ? 1 : 0) << '\n';
}

Chart build_chart(std::string param, const std::vector<std::pair<double, std::vector<RunRecord>>>& points) {
  Chart c;
  c.param = std::move(param);
  auto sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [x, records] : sorted) {
    c.xs.push_back(x);
    for (const auto& r : records)
      if (std::find(c.series.begin(), c.series.end(), r.algorithm) == c.series.end()) c.series.push_back(r.algorithm);
  }
  c.mean.assign(c.series.size(), std::vector<double>(c.xs.size(), kNaN));
  c.sd = c.mean;
  for (std::size_t p = 0; p < sorted.size(); ++p)
    for (const auto& row : summarize(sorted[p].second)) {
      const auto s = static_cast<std::size_t>(std::find(c.series.begin(), c.series.end(), row.algorithm) - c.series.begin());
      c.mean[s][p] = row.mean_wctr;
      c.sd[s][p] = row.std_wctr;
    }
  return c;
}

std::vector<Chart> load_charts(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) return {};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("runs", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, std::vector<std::pair<double, std::vector<RunRecord>>>> by_param;
  for (const auto& f : files) {
    std::ifstream in(f);
    auto records = read_records_csv(in);
    const auto stem = f.stem().string();
    if (stem == "runs") {
      // Plain runs: one point per n/m present.
      std::map<double, std::vector<RunRecord>> groups;
      for (auto& r : records) groups[static_cast<double>(r.n) / static_cast<double>(r.m)].push_back(r);
      for (auto& [x, rs] : groups) by_param["n/m"].emplace_back(x, std::move(rs));
      continue;
    }
    // runs_<param>_<value>
    const auto cut = stem.rfind('_');
    if (stem.rfind("runs_", 0) != 0 || cut == std::string::npos || cut <= 5) continue;
    const auto param = stem.substr(5, cut - 5);
    double x = 0.0;
    try {
      x = to_double(stem.substr(cut + 1), 0);
    } catch (const ParseError&) {
      continue;
    }
    by_param[param].emplace_back(x, std::move(records));
  }
  std::vector<Chart> charts;
  for (auto& [param, points] : by_param) charts.push_back(build_chart(param, points));
  return charts;
}

std::string render_svg(const Chart& c) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (double x : c.xs) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
  }
  for (std::size_t s = 0; s < c.series.size(); ++s)
    for (std::size_t p = 0; p < c.xs.size(); ++p) {
      const double m = c.mean[s][p], d = std::isnan(c.sd[s][p]) ? 0.0 : c.sd[s][p];
      if (std::isnan(m)) continue;
      ylo = std::min(ylo, m - d);
      yhi = std::max(yhi, m + d);
    }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;
  if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
  if (xhi == xlo) xlo -= 0.5, xhi += 0.5;
  if (yhi == ylo) ylo -= 0.5, yhi += 0.5;
  const double pad = 0.05 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;
  auto X = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
  auto Y = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">WCTR vs " << c.param << " (mean ± std)</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = ylo + (yhi - ylo) * k / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << Y(y) + 4 << "\" text-anchor=\"end\">" << format_number(std::round(y * 1000) / 1000) << "</text>\n";
  }
  for (double x : c.xs)
    o << "<text x=\"" << X(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << format_number(x) << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << c.param << "</text>\n";
  for (std::size_t s = 0; s < c.series.size(); ++s) {
    const char* col = colors[s % 8];
    std::ostringstream path;
    path << std::fixed << std::setprecision(2);
    bool pen = false;
    for (std::size_t p = 0; p < c.xs.size(); ++p) {
      const double m = c.mean[s][p];
      if (std::isnan(m)) {
        pen = false;
        continue;
      }
      path << (pen ? " L" : " M") << X(c.xs[p]) << ' ' << Y(m);
      pen = true;
      const double d = std::isnan(c.sd[s][p]) ? 0.0 : c.sd[s][p];
      o << "<line x1=\"" << X(c.xs[p]) << "\" y1=\"" << Y(m - d) << "\" x2=\"" << X(c.xs[p]) << "\" y2=\"" << Y(m + d)
        << "\" stroke=\"" << col << "\" stroke-opacity=\"0.5\"/>\n";
      o << "<circle cx=\"" << X(c.xs[p]) << "\" cy=\"" << Y(m) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    o << "<path d=\"" << path.str().substr(1) << "\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << col << "\">" << c.series[s] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_table(const std::vector<Chart>& charts) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4);
  for (const auto& c : charts) {
    o << "WCTR by " << c.param << '\n';
    o << std::setw(12) << c.param;
    for (const auto& s : c.series) o << std::setw(22) << s;
    o << '\n';
    for (std::size_t p = 0; p < c.xs.size(); ++p) {
      o << std::setw(12) << format_number(c.xs[p]);
      for (std::size_t s = 0; s < c.series.size(); ++s) {
        std::ostringstream v;
        v << std::fixed << std::setprecision(4);
        if (std::isnan(c.mean[s][p])) v << '-';
        else v << c.mean[s][p] << " +- " << (std::isnan(c.sd[s][p]) ? 0.0 : c.sd[s][p]);
        o << std::setw(22) << v.str();
      }
      o << '\n';
    }
    o << '\n';
  }
  return o.str();
}

}  // namespace crowdsched
