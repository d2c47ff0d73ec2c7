#pragma once

#include <string>
#include <utility>
#include <vector>

namespace modt {

enum class RowSense { LE, GE, EQ };

// Sparse linear model shared by the LP and MILP solvers.  The contract is
// deliberately narrow (columns with bounds and optional integrality, rows
// with one sense and a right-hand side, a minimization objective) so another
// solver backend could be substituted behind the same type.
struct SolverModel {
  struct Row {
    std::string name;
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms;  // (column, coefficient)
  };

  std::vector<std::string> col_name;
  std::vector<double> obj, lo, hi;
  std::vector<bool> is_integer;
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_col(const std::string& name, double objective, double lower,
              double upper, bool integer = false);
  int add_row(const std::string& name, RowSense sense, double rhs);
  void add_term(int row, int col, double coef);

  // Plain-text model dump: objective, one constraint per line, bounds and
  // integrality sections.  parse() reads the same format back.
  std::string dump() const;
  static SolverModel parse(const std::string& text);
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  TimeLimit,
};

const char* to_string(SolveStatus s);

struct LpResult {
  SolveStatus status = SolveStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;             // primal values, per column
  std::vector<double> row_dual;      // per row; >=0 for GE, <=0 for LE, free for EQ
  std::vector<double> reduced_cost;  // per column
  long iterations = 0;
};

}  // namespace modt
