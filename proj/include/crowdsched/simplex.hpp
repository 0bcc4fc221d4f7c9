#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crowdsched/core.hpp"

namespace crowdsched {

enum class RowSense { Equal, LessEqual, GreaterEqual };

struct ColumnEntry {
  std::size_t row = 0;
  double value = 0.0;
};

/// min c'x  s.t.  each row  sum_k a_rk x_k (=, <=, >=) b_r,  x >= 0.
/// Column-major sparse storage; duplicate row entries within a column are
/// not merged, so builders must avoid them.
class LinearProgram {
 public:
  struct Row {
    std::string name;
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
  };
  struct Column {
    std::string name;
    double cost = 0.0;
    std::vector<ColumnEntry> entries;
  };

  std::size_t add_row(std::string name, RowSense sense, double rhs);
  std::size_t add_column(std::string name, double cost, std::vector<ColumnEntry> entries);

  std::size_t rows() const { return rows_.size(); }
  std::size_t columns() const { return columns_.size(); }
  const Row& row(std::size_t r) const { return rows_[r]; }
  const Column& column(std::size_t k) const { return columns_[k]; }
  const std::vector<Row>& row_list() const { return rows_; }
  const std::vector<Column>& column_list() const { return columns_; }

  /// Objective value c'x.
  double objective(const std::vector<double>& x) const;
  /// Largest violation of any row or nonnegativity bound by x.
  double primal_residual(const std::vector<double>& x) const;

 private:
  std::vector<Row> rows_;
  std::vector<Column> columns_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct SimplexOptions {
  double tolerance = 1e-7;
  /// 0 picks a cap proportional to the model size.
  std::size_t max_iterations = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_switch = 50;
};

struct SimplexResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;      // one value per column
  std::vector<double> duals;  // one value per row; c - A'duals >= 0 at optimum
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  // Dual infeasibility and complementary slackness, both measured on the
  // objective normalised to max |c_k| = 1.
  double dual_residual = 0.0;
  double complementarity = 0.0;
};

/// Thrown when the iteration cap is hit. Carries the last primal feasible
/// point when phase 2 had been reached.
class IterationLimitError : public ResourceError {
 public:
  IterationLimitError(const std::string& what, std::optional<std::vector<double>> incumbent)
      : ResourceError(what), incumbent_(std::move(incumbent)) {}
  const std::optional<std::vector<double>>& incumbent() const { return incumbent_; }

 private:
  std::optional<std::vector<double>> incumbent_;
};

/// Two-phase revised simplex with an explicit dense basis inverse, Dantzig
/// pricing and Bland's rule while stalling. Deterministic for a fixed model.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace crowdsched
