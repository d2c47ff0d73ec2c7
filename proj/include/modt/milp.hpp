#pragma once

#include <vector>

#include "modt/lp_model.hpp"
#include "modt/simplex.hpp"

namespace modt {

struct MilpOptions {
  SimplexOptions lp;
  double int_tol = 1e-7;
  long max_nodes = 5'000'000;
  // Depth-first search with a periodic jump to the best-bound open node.
  long dive_restart_every = 1000;
  // Pool of near-optimal integral solutions: every integral point whose
  // objective is within best + pool_gap*max(1, |best|) is retained, up to
  // pool_size entries.  pool_size <= 1 keeps only the incumbent.
  int pool_size = 1;
  double pool_gap = 0.0;
};

struct MilpResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;  // incumbent objective, valid when status is Optimal
  double bound = 0.0;      // proven lower bound on the optimum
  std::vector<double> x;   // incumbent point
  std::vector<std::vector<double>> pool;  // retained integral points, best first
  std::vector<double> pool_obj;
  long nodes = 0;
  long lp_iterations = 0;
};

MilpResult solve_milp(const SolverModel& model, const MilpOptions& opt = {});

}  // namespace modt
