#include "crowdsched/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsched {

std::size_t LinearProgram::add_row(std::string name, RowSense sense, double rhs) {
  rows_.push_back({std::move(name), sense, rhs});
  return rows_.size() - 1;
}

std::size_t LinearProgram::add_column(std::string name, double cost,
                                      std::vector<ColumnEntry> entries) {
  for (const auto& e : entries)
    if (e.row >= rows_.size()) throw std::invalid_argument("column references unknown row");
  columns_.push_back({std::move(name), cost, std::move(entries)});
  return columns_.size() - 1;
}

double LinearProgram::objective(const std::vector<double>& x) const {
  double z = 0.0;
  for (std::size_t k = 0; k < columns_.size(); ++k) z += columns_[k].cost * x[k];
  return z;
}

double LinearProgram::primal_residual(const std::vector<double>& x) const {
  std::vector<double> activity(rows_.size(), 0.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    worst = std::max(worst, -x[k]);
    for (const auto& e : columns_[k].entries) activity[e.row] += e.value * x[k];
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const double gap = activity[r] - rows_[r].rhs;
    switch (rows_[r].sense) {
      case RowSense::Equal: worst = std::max(worst, std::abs(gap)); break;
      case RowSense::LessEqual: worst = std::max(worst, gap); break;
      case RowSense::GreaterEqual: worst = std::max(worst, -gap); break;
    }
  }
  return worst;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPricingTol = 1e-9;
constexpr double kRatioSlack = 1e-11;
constexpr std::size_t kResidualCheckPeriod = 50;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Scaled standard-form working copy. Columns: structural, then one logical
// per inequality row, then one artificial per equality or >= row.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), options_(options), m_(lp.rows()), structural_(lp.columns()) {
    build();
  }

  SimplexResult run();

 private:
  enum class PhaseOutcome { Optimal, Unbounded };

  void build();
  void refactor();
  void recompute_duals();
  double reduced_cost(std::size_t k) const;
  bool can_enter(std::size_t k) const;
  std::size_t price(bool bland) const;
  void column_image(std::size_t k, std::vector<double>& alpha) const;
  void pivot(std::size_t p, std::size_t q, const std::vector<double>& alpha, double theta, double dq);
  double basis_residual() const;
  PhaseOutcome run_phase();
  void drive_out_artificials();
  std::vector<double> structural_values() const;

  const LinearProgram& lp_;
  SimplexOptions options_;
  std::size_t m_;
  std::size_t structural_;
  bool phase_two_ = false;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
  double cost_scale_ = 1.0;

  std::vector<std::vector<ColumnEntry>> cols_;
  std::vector<char> artificial_;
  std::vector<double> cost2_;
  std::vector<double> cost_;
  std::vector<double> b_;
  std::vector<double> mult_;

  std::vector<std::size_t> basis_;
  std::vector<std::size_t> position_;  // column -> basis row, kNone when nonbasic
  std::vector<double> binv_;           // m x m row-major
  std::vector<double> xb_;
  std::vector<double> pi_;
};

void RevisedSimplex::build() {
  mult_.assign(m_, 1.0);
  std::vector<double> row_max(m_, 0.0);
  for (const auto& c : lp_.column_list())
    for (const auto& e : c.entries) row_max[e.row] = std::max(row_max[e.row], std::abs(e.value));

  std::vector<RowSense> sense(m_);
  b_.resize(m_);
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& row = lp_.row(r);
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    const double scale = row_max[r] > 0.0 ? 1.0 / row_max[r] : 1.0;
    mult_[r] = sign * scale;
    b_[r] = row.rhs * mult_[r];
    sense[r] = row.sense;
    if (sign < 0.0) {
      if (sense[r] == RowSense::LessEqual) sense[r] = RowSense::GreaterEqual;
      else if (sense[r] == RowSense::GreaterEqual) sense[r] = RowSense::LessEqual;
    }
  }

  cost_scale_ = 0.0;
  for (const auto& c : lp_.column_list()) cost_scale_ = std::max(cost_scale_, std::abs(c.cost));
  if (!(cost_scale_ > 0.0)) cost_scale_ = 1.0;

  cols_.reserve(structural_ + 2 * m_);
  for (const auto& c : lp_.column_list()) {
    auto entries = c.entries;
    for (auto& e : entries) e.value *= mult_[e.row];
    cols_.push_back(std::move(entries));
    cost2_.push_back(c.cost / cost_scale_);
    artificial_.push_back(0);
  }

  basis_.assign(m_, kNone);
  for (std::size_t r = 0; r < m_; ++r) {
    if (sense[r] == RowSense::Equal) continue;
    cols_.push_back({{r, sense[r] == RowSense::LessEqual ? 1.0 : -1.0}});
    cost2_.push_back(0.0);
    artificial_.push_back(0);
    if (sense[r] == RowSense::LessEqual) basis_[r] = cols_.size() - 1;
  }
  for (std::size_t r = 0; r < m_; ++r) {
    if (basis_[r] != kNone) continue;
    cols_.push_back({{r, 1.0}});
    cost2_.push_back(0.0);
    artificial_.push_back(1);
    basis_[r] = cols_.size() - 1;
  }

  position_.assign(cols_.size(), kNone);
  for (std::size_t r = 0; r < m_; ++r) position_[basis_[r]] = r;
  binv_.assign(m_ * m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;
  xb_ = b_;

  max_iterations_ = options_.max_iterations != 0
                        ? options_.max_iterations
                        : std::max<std::size_t>(20000, 20 * (m_ + structural_));
}

void RevisedSimplex::refactor() {
  if (m_ == 0) return;
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix basis = RowMatrix::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
  for (std::size_t p = 0; p < m_; ++p)
    for (const auto& e : cols_[basis_[p]])
      basis(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(p)) += e.value;
  RowMatrix inv = basis.partialPivLu().inverse();
  std::copy(inv.data(), inv.data() + m_ * m_, binv_.begin());
  for (std::size_t r = 0; r < m_; ++r) {
    double v = 0.0;
    const double* row = &binv_[r * m_];
    for (std::size_t k = 0; k < m_; ++k) v += row[k] * b_[k];
    xb_[r] = v;
  }
  recompute_duals();
}

void RevisedSimplex::recompute_duals() {
  pi_.assign(m_, 0.0);
  for (std::size_t p = 0; p < m_; ++p) {
    const double cb = cost_[basis_[p]];
    if (cb == 0.0) continue;
    const double* row = &binv_[p * m_];
    for (std::size_t k = 0; k < m_; ++k) pi_[k] += cb * row[k];
  }
}

double RevisedSimplex::reduced_cost(std::size_t k) const {
  double d = cost_[k];
  for (const auto& e : cols_[k]) d -= pi_[e.row] * e.value;
  return d;
}

bool RevisedSimplex::can_enter(std::size_t k) const {
  return position_[k] == kNone && !(phase_two_ && artificial_[k]);
}

std::size_t RevisedSimplex::price(bool bland) const {
  std::size_t best = kNone;
  double best_d = -kPricingTol;
  for (std::size_t k = 0; k < cols_.size(); ++k) {
    if (!can_enter(k)) continue;
    const double d = reduced_cost(k);
    if (d < best_d) {
      best = k;
      best_d = d;
      if (bland) break;
    }
  }
  return best;
}

void RevisedSimplex::column_image(std::size_t k, std::vector<double>& alpha) const {
  alpha.assign(m_, 0.0);
  for (const auto& e : cols_[k]) {
    for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv_[r * m_ + e.row] * e.value;
  }
}

void RevisedSimplex::pivot(std::size_t p, std::size_t q, const std::vector<double>& alpha,
                           double theta, double dq) {
  for (std::size_t r = 0; r < m_; ++r) xb_[r] -= theta * alpha[r];
  xb_[p] = theta;

  double* prow = &binv_[p * m_];
  const double step = dq / alpha[p];
  for (std::size_t k = 0; k < m_; ++k) pi_[k] += step * prow[k];

  const double inv = 1.0 / alpha[p];
  for (std::size_t k = 0; k < m_; ++k) prow[k] *= inv;
  for (std::size_t r = 0; r < m_; ++r) {
    if (r == p || alpha[r] == 0.0) continue;
    const double f = alpha[r];
    double* row = &binv_[r * m_];
    for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
  }

  position_[basis_[p]] = kNone;
  basis_[p] = q;
  position_[q] = p;
}

double RevisedSimplex::basis_residual() const {
  std::vector<double> act(m_, 0.0);
  for (std::size_t p = 0; p < m_; ++p)
    for (const auto& e : cols_[basis_[p]]) act[e.row] += e.value * xb_[p];
  double worst = 0.0;
  for (std::size_t r = 0; r < m_; ++r) worst = std::max(worst, std::abs(act[r] - b_[r]));
  return worst;
}

RevisedSimplex::PhaseOutcome RevisedSimplex::run_phase() {
  std::vector<double> alpha;
  std::size_t degenerate = 0;
  std::size_t recheck = 0;
  for (;;) {
    if (iterations_ >= max_iterations_) {
      std::optional<std::vector<double>> incumbent;
      if (phase_two_) incumbent = structural_values();
      throw IterationLimitError("simplex iteration limit reached", std::move(incumbent));
    }
    const bool bland = degenerate >= options_.degenerate_switch;
    const std::size_t q = price(bland);
    if (q == kNone) {
      // Confirm on a fresh factorization before declaring optimality.
      refactor();
      const bool primal_ok =
          std::all_of(xb_.begin(), xb_.end(), [](double v) { return v >= -1e-9; });
      if ((primal_ok && price(false) == kNone) || ++recheck > 3) return PhaseOutcome::Optimal;
      continue;
    }
    const double dq = reduced_cost(q);
    column_image(q, alpha);

    // Harris-style ratio test: bound the step with a small slack, then take
    // the largest pivot among rows within the bound (smallest column index
    // under Bland's rule).
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m_; ++r) {
      if (phase_two_ && artificial_[basis_[r]] && std::abs(alpha[r]) > kPivotTol) {
        bound = 0.0;
        continue;
      }
      if (alpha[r] > kPivotTol)
        bound = std::min(bound, (std::max(xb_[r], 0.0) + (bland ? 0.0 : kRatioSlack)) / alpha[r]);
    }
    if (bound == std::numeric_limits<double>::infinity()) return PhaseOutcome::Unbounded;

    std::size_t p = kNone;
    for (std::size_t r = 0; r < m_; ++r) {
      const bool art_zero = phase_two_ && artificial_[basis_[r]] && std::abs(alpha[r]) > kPivotTol;
      if (!art_zero && !(alpha[r] > kPivotTol)) continue;
      const double ratio = art_zero ? 0.0 : std::max(xb_[r], 0.0) / alpha[r];
      if (ratio > bound * (1.0 + 1e-12) + 1e-15) continue;
      if (p == kNone) {
        p = r;
      } else if (bland) {
        if (basis_[r] < basis_[p]) p = r;
      } else if (std::abs(alpha[r]) > std::abs(alpha[p])) {
        p = r;
      }
    }
    const bool art_leave = phase_two_ && artificial_[basis_[p]];
    const double theta = art_leave ? 0.0 : std::max(xb_[p], 0.0) / alpha[p];
    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;

    pivot(p, q, alpha, theta, dq);
    ++iterations_;
    if (iterations_ % kResidualCheckPeriod == 0 && basis_residual() > 1e-9) refactor();
  }
}

void RevisedSimplex::drive_out_artificials() {
  std::vector<double> alpha;
  for (std::size_t p = 0; p < m_; ++p) {
    if (!artificial_[basis_[p]]) continue;
    const double* row = &binv_[p * m_];
    std::size_t best = kNone;
    double best_val = 1e-7;
    for (std::size_t k = 0; k < cols_.size(); ++k) {
      if (artificial_[k] || position_[k] != kNone) continue;
      double v = 0.0;
      for (const auto& e : cols_[k]) v += row[e.row] * e.value;
      if (std::abs(v) > best_val) {
        best_val = std::abs(v);
        best = k;
      }
    }
    if (best == kNone) continue;  // redundant row; the artificial stays at zero
    column_image(best, alpha);
    pivot(p, best, alpha, 0.0, reduced_cost(best));
  }
}

std::vector<double> RevisedSimplex::structural_values() const {
  std::vector<double> x(structural_, 0.0);
  for (std::size_t p = 0; p < m_; ++p)
    if (basis_[p] < structural_) x[basis_[p]] = std::max(xb_[p], 0.0);
  return x;
}

SimplexResult RevisedSimplex::run() {
  SimplexResult result;

  const bool any_artificial = std::any_of(artificial_.begin(), artificial_.end(),
                                          [](char a) { return a != 0; });
  if (any_artificial) {
    cost_.assign(cols_.size(), 0.0);
    for (std::size_t k = 0; k < cols_.size(); ++k) cost_[k] = artificial_[k] ? 1.0 : 0.0;
    recompute_duals();
    run_phase();
    double infeasibility = 0.0;
    for (std::size_t p = 0; p < m_; ++p)
      if (artificial_[basis_[p]]) infeasibility += std::max(xb_[p], 0.0);
    if (infeasibility > options_.tolerance) {
      result.status = SolveStatus::Infeasible;
      result.iterations = iterations_;
      return result;
    }
    drive_out_artificials();
  }

  phase_two_ = true;
  cost_ = cost2_;
  refactor();
  if (run_phase() == PhaseOutcome::Unbounded) {
    result.status = SolveStatus::Unbounded;
    result.iterations = iterations_;
    return result;
  }

  result.status = SolveStatus::Optimal;
  result.iterations = iterations_;
  result.x = structural_values();
  result.objective = lp_.objective(result.x);
  result.primal_residual = lp_.primal_residual(result.x);

  result.duals.assign(m_, 0.0);
  for (std::size_t r = 0; r < m_; ++r) result.duals[r] = pi_[r] * mult_[r] * cost_scale_;

  std::vector<double> activity(m_, 0.0);
  double dual_res = 0.0;
  double comp = 0.0;
  for (std::size_t k = 0; k < structural_; ++k) {
    const auto& col = lp_.column(k);
    double d = col.cost;
    for (const auto& e : col.entries) {
      d -= result.duals[e.row] * e.value;
      activity[e.row] += e.value * result.x[k];
    }
    d /= cost_scale_;
    dual_res = std::max(dual_res, -d);
    comp = std::max(comp, std::abs(d * result.x[k]));
  }
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& row = lp_.row(r);
    const double y = result.duals[r] / cost_scale_;
    const double slack = row.rhs - activity[r];
    if (row.sense == RowSense::LessEqual) dual_res = std::max(dual_res, y);
    if (row.sense == RowSense::GreaterEqual) dual_res = std::max(dual_res, -y);
    if (row.sense != RowSense::Equal) comp = std::max(comp, std::abs(y * slack));
  }
  result.dual_residual = dual_res;
  result.complementarity = comp;
  return result;
}

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  RevisedSimplex solver(lp, options);
  return solver.run();
}

}  // namespace crowdsched
