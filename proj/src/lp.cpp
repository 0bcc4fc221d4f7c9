#include "crowdsched/lp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace crowdsched {

namespace {

constexpr double kDropBelow = 1e-12;

std::string slot_name(const char* prefix, std::size_t a, std::size_t b) {
  return std::string(prefix) + std::to_string(a) + "_" + std::to_string(b);
}

std::string var_name(std::size_t i, std::size_t j, std::size_t l) {
  return "x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(l);
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("bad number '" + s + "'", line);
  return v;
}

std::size_t column_lookup_key(const LpModel& m, std::size_t i, std::size_t j, std::size_t l) {
  return (i * m.tasks + j) * m.slot_start.size() + l;
}

}  // namespace

std::string to_string(IntervalObjective o) {
  return o == IntervalObjective::MeanBusy ? "mean-busy" : "literal";
}

IntervalObjective parse_interval_objective(const std::string& name) {
  if (name == "mean-busy") return IntervalObjective::MeanBusy;
  if (name == "literal") return IntervalObjective::Literal;
  throw std::invalid_argument("unknown LP objective '" + name + "' (mean-busy|literal)");
}

LpModel build_time_indexed(const Instance& instance, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (instance.rst(i, j) != std::floor(instance.rst(i, j)))
        throw std::invalid_argument("time-indexed LP needs integer processing times");

  LpModel model;
  model.kind = LpKind::TimeIndexed;
  model.workers = m;
  model.tasks = n;
  for (std::size_t s = 0; s < horizon; ++s) {
    model.slot_start.push_back(static_cast<double>(s));
    model.slot_end.push_back(static_cast<double>(s + 1));
  }
  auto& lp = model.program;
  for (std::size_t j = 0; j < n; ++j) lp.add_row("assign_" + std::to_string(j), RowSense::Equal, 1.0);
  // cap_i_t covers time unit [t-1, t); rows created for every (i, t).
  const std::size_t cap0 = lp.rows();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 1; t <= horizon; ++t) lp.add_row(slot_name("cap_", i, t), RowSense::LessEqual, 1.0);

  for (std::size_t i = 0; i < m; ++i) {
    const double overhead = instance.worker(i).contact_time();
    for (std::size_t j = 0; j < n; ++j) {
      const auto p = static_cast<std::size_t>(instance.rst(i, j));
      if (p > horizon) continue;
      for (std::size_t s = 0; s + p <= horizon; ++s) {
        std::vector<ColumnEntry> col{{j, 1.0}};
        // Busy during [s, s+p): rows t = s+1 .. s+p.
        for (std::size_t t = s + 1; t <= s + p; ++t) col.push_back({cap0 + i * horizon + (t - 1), 1.0});
        const double cost = instance.weight(j) * (overhead + static_cast<double>(s + p));
        lp.add_column(var_name(i, j, s), cost, std::move(col));
        model.vars.push_back({i, j, s});
      }
    }
  }
  return model;
}

std::vector<double> interval_points(double total_processing, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  // L = smallest integer with (1+eps)^L >= total; 0 when total <= 1.
  std::size_t L = 0;
  double top = 1.0;
  while (top < total_processing) {
    top *= 1.0 + epsilon;
    ++L;
  }
  std::vector<double> t{0.0};
  double v = 1.0;
  for (std::size_t l = 1; l <= L + 1; ++l) {
    t.push_back(v);
    v *= 1.0 + epsilon;
  }
  return t;
}

LpModel build_interval_indexed(const Instance& instance, double epsilon, IntervalObjective objective) {
  const auto overhead = instance.contact_times();
  return build_interval_indexed(instance, epsilon, objective, overhead);
}

LpModel build_interval_indexed(const Instance& instance, double epsilon, IntervalObjective objective,
                               std::span<const double> overhead) {
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  if (overhead.size() != m) throw std::invalid_argument("overhead must have one entry per worker");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double mx = 0.0;
    for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, instance.rst(i, j));
    total += mx;
  }
  auto t = interval_points(total, epsilon);
  if (objective == IntervalObjective::Literal) {
    // Forbidding p_ij > t_{l+1} leaves long tasks only the last interval, so
    // extend geometrically until that interval alone can hold everything.
    while (t[t.size() - 1] - t[t.size() - 2] < total) t.push_back(t.back() * (1.0 + epsilon));
  }

  LpModel model;
  model.kind = LpKind::IntervalIndexed;
  model.workers = m;
  model.tasks = n;
  model.slot_start.assign(t.begin(), t.end() - 1);
  model.slot_end.assign(t.begin() + 1, t.end());
  const std::size_t slots = model.slot_start.size();

  auto& lp = model.program;
  for (std::size_t j = 0; j < n; ++j) lp.add_row("assign_" + std::to_string(j), RowSense::Equal, 1.0);
  if (n == 0) return model;
  const std::size_t cap0 = lp.rows();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < slots; ++l)
      lp.add_row(slot_name("cap_", i, l), RowSense::LessEqual, t[l + 1] - t[l]);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = instance.rst(i, j);
      for (std::size_t l = 0; l < slots; ++l) {
        double coef = 0.0;
        if (objective == IntervalObjective::Literal) {
          if (p > t[l + 1]) continue;
          coef = overhead[i] + t[l] + p;
        } else {
          coef = overhead[i] + t[l] + 0.5 * p;
        }
        std::vector<ColumnEntry> col{{j, 1.0}};
        if (p != 0.0) col.push_back({cap0 + i * slots + l, p});
        lp.add_column(var_name(i, j, l), instance.weight(j) * coef, std::move(col));
        model.vars.push_back({i, j, l});
      }
    }
  }
  return model;
}

FractionalSolution::FractionalSolution(std::size_t workers, std::size_t tasks,
                                       std::vector<double> slot_start,
                                       std::vector<FractionalEntry> entries, double objective)
    : workers_(workers),
      tasks_(tasks),
      slot_start_(std::move(slot_start)),
      entries_(std::move(entries)),
      y_(workers * tasks, 0.0),
      by_task_(tasks),
      objective_(objective) {
  std::sort(entries_.begin(), entries_.end(), [](const FractionalEntry& a, const FractionalEntry& b) {
    if (a.task != b.task) return a.task < b.task;
    if (a.slot != b.slot) return a.slot < b.slot;
    return a.worker < b.worker;
  });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.worker >= workers_ || e.task >= tasks_ || e.slot >= slot_start_.size())
      throw std::invalid_argument("fractional entry out of range");
    if (!(e.value >= 0.0)) throw std::invalid_argument("fractional entry must be nonnegative");
    y_[e.worker * tasks_ + e.task] += e.value;
    by_task_[e.task].push_back(k);
  }
}

FractionalSolution integral_solution(const LpModel& model, const Instance& instance,
                                     const Schedule& schedule) {
  schedule.validate(instance);
  std::map<std::size_t, std::size_t> column;
  for (std::size_t k = 0; k < model.vars.size(); ++k) {
    const auto& v = model.vars[k];
    column[column_lookup_key(model, v.worker, v.task, v.slot)] = k;
  }
  std::vector<double> x(model.vars.size(), 0.0);
  std::vector<FractionalEntry> entries;
  auto place = [&](std::size_t i, std::size_t j, std::size_t l, double value) {
    auto it = column.find(column_lookup_key(model, i, j, l));
    if (it == column.end())
      throw std::invalid_argument("schedule uses a variable the model forbids");
    x[it->second] += value;
    entries.push_back({i, j, l, value});
  };
  for (std::size_t i = 0; i < schedule.order.size(); ++i) {
    double start = 0.0;
    for (std::size_t j : schedule.order[i]) {
      const double p = instance.rst(i, j);
      const double end = start + p;
      if (model.kind == LpKind::TimeIndexed) {
        place(i, j, static_cast<std::size_t>(start), 1.0);
      } else {
        const auto& a = model.slot_start;
        const auto& b = model.slot_end;
        if (p == 0.0) {
          std::size_t l = 0;
          while (l + 1 < a.size() && a[l + 1] <= start) ++l;
          place(i, j, l, 1.0);
        } else {
          for (std::size_t l = 0; l < a.size(); ++l) {
            const double overlap = std::min(end, b[l]) - std::max(start, a[l]);
            if (overlap > 0.0) place(i, j, l, overlap / p);
          }
        }
      }
      start = end;
    }
  }
  FractionalSolution sol(model.workers, model.tasks, model.slot_start, std::move(entries),
                         model.program.objective(x));
  sol.primal_residual = model.program.primal_residual(x);
  return sol;
}

LpSolveResult solve(const LpModel& model, double tolerance) {
  SimplexOptions opt;
  opt.tolerance = tolerance;
  auto res = solve_simplex(model.program, opt);
  LpSolveResult out;
  out.status = res.status;
  if (res.status != SolveStatus::Optimal) return out;
  std::vector<FractionalEntry> entries;
  for (std::size_t k = 0; k < model.vars.size(); ++k) {
    if (res.x[k] <= kDropBelow) continue;
    const auto& v = model.vars[k];
    entries.push_back({v.worker, v.task, v.slot, res.x[k]});
  }
  out.solution = FractionalSolution(model.workers, model.tasks, model.slot_start,
                                    std::move(entries), res.objective);
  out.solution.primal_residual = res.primal_residual;
  out.solution.dual_residual = res.dual_residual;
  out.solution.complementarity = res.complementarity;
  out.solution.iterations = res.iterations;
  return out;
}

double lower_bound(const Instance& instance, double epsilon, IntervalObjective objective) {
  auto res = solve(build_interval_indexed(instance, epsilon, objective));
  if (res.status != SolveStatus::Optimal)
    throw ResourceError("interval LP did not solve to optimality");
  return res.solution.objective();
}

void export_model(std::ostream& out, const LinearProgram& program) {
  // Row-major view for the constraint section.
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(program.rows());
  for (std::size_t k = 0; k < program.columns(); ++k)
    for (const auto& e : program.column(k).entries) rows[e.row].push_back({k, e.value});

  auto term = [&](double coef, std::size_t k, bool first) {
    std::string s;
    if (coef < 0.0) {
      s += first ? "- " : " - ";
      coef = -coef;
    } else if (!first) {
      s += " + ";
    }
    s += format_number(coef) + " " + program.column(k).name;
    return s;
  };

  out << "\\ crowdsched relaxation\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (std::size_t k = 0; k < program.columns(); ++k) {
    out << (first ? " " : "") << term(program.column(k).cost, k, first);
    first = false;
  }
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < program.rows(); ++r) {
    const auto& row = program.row(r);
    out << " " << row.name << ":";
    if (rows[r].empty()) {
      // The format needs a left-hand side; a zero multiple of any column does.
      if (program.columns() == 0)
        throw std::invalid_argument("cannot export a constraint row without columns");
      out << " 0 " << program.column(0).name;
    }
    first = true;
    for (const auto& [k, v] : rows[r]) {
      out << (first ? " " : "") << term(v, k, first);
      first = false;
    }
    const char* sense = row.sense == RowSense::Equal ? " = " : row.sense == RowSense::LessEqual ? " <= " : " >= ";
    out << sense << format_number(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t k = 0; k < program.columns(); ++k) out << " " << program.column(k).name << " >= 0\n";
  out << "End\n";
}

std::string export_model(const LinearProgram& program) {
  std::ostringstream out;
  export_model(out, program);
  return out.str();
}

LinearProgram import_model(std::istream& in) {
  enum class Section { None, Objective, Constraints, Bounds, Done } section = Section::None;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> tokens;
  std::vector<std::size_t> token_line;
  // Tokenise the whole document, keeping section keywords as tokens.
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
      token_line.push_back(lineno);
    }
  }

  struct PendingRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
  };
  std::vector<std::pair<std::string, double>> objective;
  std::vector<PendingRow> rows;
  std::vector<std::string> order;  // column names by first appearance
  std::map<std::string, std::size_t> seen;
  auto note = [&](const std::string& name) {
    if (seen.emplace(name, order.size()).second) order.push_back(name);
  };

  std::size_t k = 0;
  auto parse_terms = [&](std::vector<std::pair<std::string, double>>& dst, bool stop_on_sense) {
    double sign = 1.0;
    while (k < tokens.size()) {
      const auto& tok = tokens[k];
      if (tok == "Subject" || tok == "Bounds" || tok == "End") return;
      if (stop_on_sense && (tok == "<=" || tok == ">=" || tok == "=")) return;
      if (!stop_on_sense && tok.back() == ':') return;
      if (tok == "+") { sign = 1.0; ++k; continue; }
      if (tok == "-") { sign = -1.0; ++k; continue; }
      const double coef = parse_number(tok, token_line[k]);
      if (k + 1 >= tokens.size()) throw ParseError("term without variable", token_line[k]);
      const auto& name = tokens[k + 1];
      note(name);
      dst.push_back({name, sign * coef});
      sign = 1.0;
      k += 2;
    }
  };

  while (k < tokens.size() && section != Section::Done) {
    const auto& tok = tokens[k];
    if (tok == "Minimize") { section = Section::Objective; ++k; continue; }
    if (tok == "Subject") {
      if (k + 1 >= tokens.size() || tokens[k + 1] != "To") throw ParseError("expected 'Subject To'", token_line[k]);
      section = Section::Constraints;
      k += 2;
      continue;
    }
    if (tok == "Bounds") { section = Section::Bounds; ++k; continue; }
    if (tok == "End") { section = Section::Done; ++k; continue; }
    switch (section) {
      case Section::Objective: {
        if (tok.back() != ':') throw ParseError("expected objective label", token_line[k]);
        ++k;
        parse_terms(objective, false);
        break;
      }
      case Section::Constraints: {
        if (tok.back() != ':') throw ParseError("expected constraint label", token_line[k]);
        PendingRow row;
        row.name = tok.substr(0, tok.size() - 1);
        ++k;
        parse_terms(row.terms, true);
        if (k + 1 >= tokens.size()) throw ParseError("constraint without right-hand side", token_line[k - 1]);
        const auto& s = tokens[k];
        row.sense = s == "=" ? RowSense::Equal : s == "<=" ? RowSense::LessEqual : RowSense::GreaterEqual;
        row.rhs = parse_number(tokens[k + 1], token_line[k + 1]);
        k += 2;
        rows.push_back(std::move(row));
        break;
      }
      case Section::Bounds: {
        // Only nonnegativity bounds are written: "name >= 0".
        if (k + 2 >= tokens.size() || tokens[k + 1] != ">=" || parse_number(tokens[k + 2], token_line[k]) != 0.0)
          throw ParseError("unsupported bound", token_line[k]);
        note(tok);
        k += 3;
        break;
      }
      default:
        throw ParseError("unexpected token '" + tok + "'", token_line[k]);
    }
  }
  if (section != Section::Done) throw ParseError("missing End", lineno);

  LinearProgram lp;
  std::vector<double> cost(order.size(), 0.0);
  std::vector<std::vector<ColumnEntry>> cols(order.size());
  for (const auto& [name, v] : objective) cost[seen[name]] += v;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    lp.add_row(rows[r].name, rows[r].sense, rows[r].rhs);
    for (const auto& [name, v] : rows[r].terms)
      if (v != 0.0) cols[seen[name]].push_back({r, v});
  }
  for (std::size_t c = 0; c < order.size(); ++c) lp.add_column(order[c], cost[c], std::move(cols[c]));
  return lp;
}

}  // namespace crowdsched
