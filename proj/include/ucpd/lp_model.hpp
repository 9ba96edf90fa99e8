#pragma once

// Sparse linear program container shared by the row builders, the simplex
// solver, the branch-and-bound driver and the text export.

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ucpd/model.hpp"

namespace ucpd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : char { kLE = 'L', kGE = 'G', kEQ = 'E' };

struct LpRow {
  std::vector<std::pair<int, double>> terms;  // (column, coefficient)
  RowSense sense = RowSense::kLE;
  double rhs = 0.0;
  std::string name;
};

struct LpModel {
  std::vector<double> objective;
  double objective_offset = 0.0;  // constant added to every objective value
  std::vector<double> lower, upper;
  std::vector<uint8_t> integer;  // integrality marks, used by the ILP solver
  std::vector<std::string> col_names;
  std::vector<LpRow> rows;

  int num_cols() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_col(double cost, double lb, double ub, bool is_integer,
              std::string name) {
    objective.push_back(cost);
    lower.push_back(lb);
    upper.push_back(ub);
    integer.push_back(is_integer ? 1 : 0);
    col_names.push_back(std::move(name));
    return num_cols() - 1;
  }

  LpRow& add_row(RowSense sense, double rhs, std::string name) {
    rows.push_back(LpRow{{}, sense, rhs, std::move(name)});
    return rows.back();
  }

  // Activity of one row at the point x.
  double row_activity(const LpRow& row, const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& [j, coef] : row.terms) a += coef * x[static_cast<size_t>(j)];
    return a;
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterLimit: return "iteration_limit";
  }
  return "?";
}

enum class VarStatus : uint8_t { kBasic, kAtLower, kAtUpper, kFreeNonbasic };

// Simplex basis: statuses for the structural columns and for one logical
// (slack) variable per row. A basis from a smaller column set may warm-start
// a model that has grown new columns; the new columns start nonbasic.
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> logical;
  bool empty() const { return structural.empty() && logical.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kIterLimit;
  double objective = 0.0;       // includes the model's objective_offset
  double dual_objective = 0.0;  // for the strong-duality check
  std::vector<double> x;        // structural values
  std::vector<double> duals;    // one per row
  std::vector<double> reduced_costs;
  Basis basis;
  int64_t iterations = 0;
};

}  // namespace ucpd
