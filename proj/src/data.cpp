#include "crowdsched/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "crowdsched/random.hpp"

namespace crowdsched {

using nlohmann::json;

namespace {

void check_range(const Range& r, const char* name) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
    throw std::invalid_argument(std::string(name) + " must satisfy 0 < lo <= hi");
}

double uniform(Rng& rng, const Range& r) { return r.lo + (r.hi - r.lo) * uniform01(rng); }

double truncated_alpha(Rng& rng, double mean, double sd) {
  if (sd == 0.0) return std::max(mean, 1.0);
  std::normal_distribution<double> normal(mean, sd);
  // Rejection is cheap here: P(alpha >= 1) is far from zero for sane inputs.
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const double a = normal(rng);
    if (a >= 1.0) return a;
  }
  throw std::invalid_argument("alpha distribution has almost no mass above 1");
}

// Alpha, gamma and weights for n tasks over `betas.size()` workers.
std::vector<std::vector<double>> task_matrix(const SyntheticConfig& c, const std::vector<double>& betas,
                                             std::size_t n, std::vector<double>& weights) {
  const std::size_t m = betas.size();
  std::vector<std::vector<double>> rst(m, std::vector<double>(n));
  weights.resize(n);
  const auto wlo = static_cast<long long>(c.weight_range.lo);
  const auto whi = static_cast<long long>(c.weight_range.hi);
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(derive_seed(c.seed, {1, j}));
    const double alpha = truncated_alpha(rng, c.alpha_mean, c.alpha_std);
    weights[j] = static_cast<double>(std::uniform_int_distribution<long long>(wlo, whi)(rng));
    Rng g(derive_seed(c.seed, {2, j}));
    for (std::size_t i = 0; i < m; ++i) rst[i][j] = alpha * betas[i] * uniform(g, c.gamma_range);
  }
  return rst;
}

double parse_number(std::string_view token, std::size_t line, const char* what) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " '" + std::string(token) + "'", line);
  return v;
}

Range range_from_json(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 2) throw ParseError(std::string(key) + " must be [lo, hi]", 0);
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

void SyntheticConfig::validate() const {
  if (m == 0) throw std::invalid_argument("m must be positive");
  if (tasks_per_worker == 0) throw std::invalid_argument("tasks_per_worker must be positive");
  check_range(phi_total_range, "phi_total_range");
  check_range(beta_range, "beta_range");
  check_range(gamma_range, "gamma_range");
  check_range(weight_range, "weight_range");
  if (weight_range.lo != std::floor(weight_range.lo) || weight_range.hi != std::floor(weight_range.hi))
    throw std::invalid_argument("weight_range bounds must be integers");
  if (!(alpha_mean > 0.0) || !std::isfinite(alpha_mean)) throw std::invalid_argument("alpha_mean must be positive");
  if (!(alpha_std >= 0.0) || !std::isfinite(alpha_std)) throw std::invalid_argument("alpha_std must be >= 0");
}

SyntheticConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);
  SyntheticConfig c;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "m") c.m = v.get<std::size_t>();
      else if (key == "tasks_per_worker") c.tasks_per_worker = v.get<std::size_t>();
      else if (key == "phi_total_range") c.phi_total_range = range_from_json(v, "phi_total_range");
      else if (key == "alpha_mean") c.alpha_mean = v.get<double>();
      else if (key == "alpha_std") c.alpha_std = v.get<double>();
      else if (key == "beta_range") c.beta_range = range_from_json(v, "beta_range");
      else if (key == "gamma_range") c.gamma_range = range_from_json(v, "gamma_range");
      else if (key == "weight_range") c.weight_range = range_from_json(v, "weight_range");
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else throw ParseError("unknown config field '" + key + "'", 0);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  return c;
}

json config_to_json(const SyntheticConfig& c) {
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  return json{{"m", c.m},
              {"tasks_per_worker", c.tasks_per_worker},
              {"phi_total_range", range(c.phi_total_range)},
              {"alpha_mean", c.alpha_mean},
              {"alpha_std", c.alpha_std},
              {"beta_range", range(c.beta_range)},
              {"gamma_range", range(c.gamma_range)},
              {"weight_range", range(c.weight_range)},
              {"seed", c.seed}};
}

SyntheticConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  return config_from_json(doc);
}

Instance generate(const SyntheticConfig& config) {
  config.validate();
  const std::size_t m = config.m;
  std::vector<double> phi(m), beta(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng(derive_seed(config.seed, {0, i}));
    phi[i] = uniform(rng, config.phi_total_range) / 2.0;
    beta[i] = uniform(rng, config.beta_range);
  }
  std::vector<double> weights;
  auto rst = task_matrix(config, beta, config.tasks(), weights);
  return Instance(std::move(phi), std::move(weights), std::move(rst));
}

std::vector<ContactRecord> read_contacts(std::istream& in) {
  std::vector<ContactRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream fields(text);
    std::string device, start, end, extra;
    if (!(fields >> device)) continue;  // blank
    if (device[0] == '#') continue;
    if (!(fields >> start >> end)) throw ParseError("expected 'device_id start end'", line);
    if (fields >> extra) throw ParseError("unexpected field '" + extra + "'", line);
    ContactRecord r{device, parse_number(start, line, "start time"), parse_number(end, line, "end time")};
    if (r.start < 0.0) throw ParseError("negative contact time", line);
    if (r.start > r.end) throw ParseError("contact ends before it starts", line);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ContactRecord> load_contacts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  return read_contacts(in);
}

TraceStats ingest_trace(const std::vector<ContactRecord>& records, std::size_t top_k) {
  std::map<std::string, std::vector<double>> starts;
  for (const auto& r : records) starts[r.device].push_back(r.start);
  TraceStats stats;
  for (auto& [device, t] : starts) {
    if (t.size() < 2) continue;
    std::sort(t.begin(), t.end());
    const double total = t.back() - t.front();  // the gaps telescope
    if (!(total > 0.0)) {
      stats.warnings.push_back("device " + device + " dropped: all contacts start at the same time");
      continue;
    }
    WorkerStats w;
    w.device = device;
    w.contacts = t.size();
    w.total_gap = total;
    w.lambda = static_cast<double>(t.size() - 1) / total;
    w.phi = 1.0 / w.lambda;
    stats.workers.push_back(std::move(w));
  }
  if (stats.workers.empty()) throw std::invalid_argument("no device has two contacts at distinct times");
  stats.eligible = stats.workers.size();
  std::stable_sort(stats.workers.begin(), stats.workers.end(),
                   [](const WorkerStats& a, const WorkerStats& b) { return a.lambda > b.lambda; });
  if (stats.workers.size() > top_k) stats.workers.resize(top_k);
  return stats;
}

Instance instance_from_trace(const TraceStats& stats, SyntheticConfig tasks, bool keep_beta) {
  if (stats.workers.empty()) throw std::invalid_argument("trace statistics are empty");
  tasks.m = stats.workers.size();
  if (!keep_beta) tasks.beta_range = {1.0, 1.0};
  tasks.validate();
  const std::size_t m = tasks.m;
  std::vector<double> phi(m), beta(m);
  for (std::size_t i = 0; i < m; ++i) {
    phi[i] = stats.workers[i].phi;
    Rng rng(derive_seed(tasks.seed, {0, i}));
    uniform(rng, tasks.phi_total_range);  // keep beta on the synthetic stream position
    beta[i] = uniform(rng, tasks.beta_range);
  }
  std::vector<double> weights;
  auto rst = task_matrix(tasks, beta, tasks.tasks(), weights);
  return Instance(std::move(phi), std::move(weights), std::move(rst));
}

void write_meeting_trace(std::ostream& out, const MeetingTrace& trace) {
  auto num = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  out << "# horizon " << num(trace.horizon) << '\n';
  for (const auto& e : trace.events) out << e.worker << ' ' << num(e.time) << ' ' << num(e.time) << '\n';
}

MeetingTrace read_meeting_trace(std::istream& in) {
  // The horizon line is a comment for the contact parser, so read the text
  // once and hand it over.
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  MeetingTrace trace;
  bool have_horizon = false;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      std::istringstream f(line);
      std::string hash, key, value;
      if (f >> hash >> key >> value && hash == "#" && key == "horizon") {
        trace.horizon = parse_number(value, 0, "horizon");
        have_horizon = true;
        break;
      }
    }
  }
  std::istringstream body(text);
  double last = 0.0;
  for (const auto& r : read_contacts(body)) {
    std::size_t worker = 0;
    const auto* end = r.device.data() + r.device.size();
    auto [ptr, ec] = std::from_chars(r.device.data(), end, worker);
    if (ec != std::errc() || ptr != end) throw ParseError("worker id must be an index: " + r.device, 0);
    trace.events.push_back({r.start, worker});
    last = std::max(last, r.start);
  }
  if (!have_horizon) trace.horizon = last;
  return trace;
}

}  // namespace crowdsched
