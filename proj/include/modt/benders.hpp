#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modt/assignment.hpp"
#include "modt/common.hpp"
#include "modt/design_model.hpp"
#include "modt/network.hpp"

namespace modt {

// Dual solution of one destination's subproblem.  mu holds the node
// balance duals; lambda1/lambda5 the boarding and pickup limit duals per
// link; lambda2..lambda4 the per-frequency envelope duals flattened as
// [link * num_frequencies + f]; lambda6..lambda8 the per-fleet-option
// envelope duals flattened as [node * num_fleet_options + n].  Entries
// outside their domain stay zero.
struct SubproblemDuals {
  int destination = -1;
  std::vector<double> mu;
  std::vector<double> lambda1;
  std::vector<double> lambda2, lambda3, lambda4;
  std::vector<double> lambda5;
  std::vector<double> lambda6, lambda7, lambda8;
};

struct SubproblemResult {
  AssignmentSolution assignment;
  std::vector<SubproblemDuals> duals;  // aligned with network destinations
  long lp_fallbacks = 0;  // destinations the closed-form completion rejected
};

// Solves the fixed-design subproblem: the assignment for the design plus a
// dual certificate per destination.  Duals come from a closed-form
// completion of the label-setting solution; a destination whose completion
// fails verification is re-solved as an explicit linear program.
SubproblemResult solve_subproblem(const MultimodalNetwork& net,
                                  const DesignConfig& cfg,
                                  const std::vector<std::vector<double>>& wait_bound,
                                  const DesignDecision& decision,
                                  bool parallel = true);

// Explicit linear-program reference for one destination.  Returns the
// duals and writes the LP optimum to objective_out when non-null.
SubproblemDuals solve_subproblem_lp(
    const MultimodalNetwork& net, const DesignConfig& cfg,
    const std::vector<std::vector<double>>& wait_bound,
    const DesignDecision& decision, int destination,
    double* objective_out = nullptr);

// Largest violation of the subproblem dual constraints and sign conditions,
// each scaled by the size of its terms; a correct dual solution stays at
// numerical noise.  The feasible dual region does not depend on the design,
// which is what keeps every cut valid across the whole design space, so no
// design argument appears here.
double check_subproblem_duals(const MultimodalNetwork& net,
                              const DesignConfig& cfg,
                              const SubproblemDuals& duals);

// Lower-bounding cut on a destination cost (or their sum when
// destination is -1) as an affine function of the design binaries.
struct OptimalityCut {
  int destination = -1;
  double constant = 0.0;
  std::vector<std::vector<double>> y_coef;  // [line][frequency index]
  std::vector<std::vector<double>> n_coef;  // [zone][fleet index]

  double rhs_at(const DesignDecision& d) const;
  std::uint64_t hash() const;
};

// Builds the cut priced by one destination's duals, still supporting the
// generating design exactly.  Coefficients deep enough to push the bound
// below zero for every design taking their option are raised until that
// best case lands at zero: the destination cost is never negative, so the
// cut stays valid, and the master never sees coefficients on the scale of
// the wait bounds.
OptimalityCut make_destination_cut(const MultimodalNetwork& net,
                                   const DesignConfig& cfg,
                                   const std::vector<double>& wait_bound_row,
                                   const SubproblemDuals& duals);
std::vector<OptimalityCut> make_disaggregated_cuts(
    const MultimodalNetwork& net, const DesignConfig& cfg,
    const std::vector<std::vector<double>>& wait_bound,
    const SubproblemResult& sp);
// Coefficient-wise sum of the per-destination cuts, bounding total cost.
OptimalityCut make_classic_cut(const MultimodalNetwork& net,
                               const DesignConfig& cfg,
                               const std::vector<std::vector<double>>& wait_bound,
                               const SubproblemResult& sp);

// At most floor(fleet_budget / option) zones can take a fleet option.
struct CliqueCut {
  int fleet_index = -1;
  int limit = 0;
};
std::vector<CliqueCut> make_clique_cuts(const DesignConfig& cfg,
                                        int num_zones);

// Minimal covers of the bus budget: the members cannot all be chosen.
struct CoverCut {
  std::vector<std::pair<int, int>> members;  // (line, frequency index)
};
std::vector<CoverCut> make_cover_cuts(const MultimodalNetwork& net,
                                      const DesignConfig& cfg);

struct BendersConfig {
  double epsilon = 1e-6;
  long max_iterations = 10000;
  double time_limit_seconds = kInf;
  bool disaggregated = true;
  bool clique_cover = true;
  int pool_size = 1;       // master solutions per iteration for extra cuts
  double pool_gap = 0.05;  // relative window for pooled master solutions
  bool cut_cleanup = false;
  int cleanup_patience = 5;  // slack master solves before a cut is parked
  bool parallel = true;
};

struct BendersIteration {
  long iteration = 0;
  double lower_bound = 0.0;   // master objective this iteration
  double upper_bound = 0.0;   // subproblem objective this iteration
  double best_upper = 0.0;    // incumbent objective so far
  double gap_percent = 0.0;
  int cuts_added = 0;
  int cuts_removed = 0;
  int active_cuts = 0;
  double seconds = 0.0;
};

struct BendersRun {
  DesignDecision best_design;
  double best_objective = kInf;
  double lower_bound = -kInf;
  double gap_percent = 0.0;
  bool converged = false;
  std::string stop_reason;
  std::vector<BendersIteration> trace;
  long subproblem_solves = 0;
  long lp_fallbacks = 0;
};

// Single aggregated cut per iteration, no extra cut families.
BendersRun run_classic(const MultimodalNetwork& net, const DesignConfig& cfg,
                       const BendersConfig& bcfg);
// Honors every BendersConfig toggle: per-destination cuts, clique and
// cover preloading, pooled master solutions, periodic cut removal.
BendersRun run_enhanced(const MultimodalNetwork& net, const DesignConfig& cfg,
                        const BendersConfig& bcfg);

void write_trace_csv(const std::string& path, const BendersRun& run);

}  // namespace modt
