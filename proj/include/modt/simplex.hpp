#pragma once

#include "modt/lp_model.hpp"

namespace modt {

struct SimplexOptions {
  double pivot_tol = 1e-9;       // minimum pivot magnitude
  double feas_tol = 1e-7;        // primal feasibility tolerance
  double dual_tol = 1e-7;        // reduced-cost optimality tolerance
  long max_iterations = 2'000'000;
  int refactor_every = 96;       // rebuild the basis inverse this often
  int bland_after = 400;         // consecutive degenerate pivots before Bland's rule
};

// Bounded-variable two-phase primal simplex.  Returns primal values, one dual
// per row (>=0 for GE rows, <=0 for LE rows, free for EQ rows) and reduced
// costs per column.  Deterministic: Dantzig pricing with smallest-index tie
// breaking, Bland's rule as the anti-cycling fallback.
LpResult solve_lp(const SolverModel& model, const SimplexOptions& opt = {});

// Post-solve audit used by tests: checks primal feasibility, dual sign
// conventions, dual feasibility of reduced costs and the strong-duality gap
// |c'x - dual objective| <= 1e-6 * (1 + |c'x|).  Returns an empty string when
// everything holds, else a description of the first violation.
std::string verify_lp_certificate(const SolverModel& model, const LpResult& res,
                                  double feas_tol = 1e-7, double dual_tol = 1e-6);

}  // namespace modt
