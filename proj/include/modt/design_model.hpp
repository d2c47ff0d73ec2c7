#pragma once

#include <string>
#include <vector>

#include "modt/assignment.hpp"
#include "modt/common.hpp"
#include "modt/lp_model.hpp"
#include "modt/network.hpp"

namespace modt {

// Service-design search space and budgets.  Frequencies are quoted in
// buses per hour as operators would; constraint rows convert to per-minute
// rates so they compose with travel times in minutes.
struct DesignConfig {
  std::vector<double> theta;  // candidate line frequencies, buses per hour
  std::vector<double> omega;  // candidate per-zone fleet sizes
  double bus_budget = kInf;
  double fleet_budget = kInf;
  AssignmentParams params;

  // Throws DataError on an empty or non-positive menu, a missing 0.01
  // fleet sentinel, or parameter vectors that do not match the network.
  void validate(const MultimodalNetwork& net) const;
};

// theta converted to boardings per minute.
std::vector<double> frequencies_per_minute(const DesignConfig& cfg);

// One point of the design space: a frequency index per line (-1 keeps the
// line closed) and a fleet index per zone.
struct DesignDecision {
  std::vector<int> frequency_choice;
  std::vector<int> fleet_choice;

  bool operator==(const DesignDecision&) const = default;
};

ServiceDesign to_service_design(const DesignDecision& d,
                                const DesignConfig& cfg);

// Buses consumed by running one line at the given frequency: frequency
// times round-trip time, rounded up to whole vehicles.
int buses_required(const MultimodalNetwork& net, int line,
                   double freq_per_hour);

int total_buses(const MultimodalNetwork& net, const DesignDecision& d,
                const DesignConfig& cfg);
double total_vehicles(const DesignDecision& d, const DesignConfig& cfg);
bool within_budgets(const MultimodalNetwork& net, const DesignDecision& d,
                    const DesignConfig& cfg);

// Mixed-integer model selecting frequencies and fleets together with the
// passenger assignment they induce.  Products of binaries and wait times
// are carried by surrogate columns constrained to their exact envelopes,
// so integral solutions price waits without approximation.
struct DesignMilp {
  SolverModel model;
  std::vector<int> destinations;          // column-block order
  std::vector<std::vector<int>> v_col;    // [link][destination block]
  std::vector<std::vector<int>> w_col;    // [node][destination block], -1 off
                                          // the waiting set
  std::vector<int> x_col;                 // [line]
  std::vector<std::vector<int>> y_col;    // [line][frequency index]
  std::vector<std::vector<int>> n_col;    // [zone][fleet index]

  // Surrogate column equal to binary * wait at integral points.
  struct Surrogate {
    int col = -1;
    int binary_col = -1;
    int wait_col = -1;
  };
  std::vector<Surrogate> surrogates;
};

// wait_bound is indexed [destination block][node] and must be finite on
// every waiting node; wait_upper_bounds supplies a valid envelope.
DesignMilp build_design_milp(const MultimodalNetwork& net,
                             const DesignConfig& cfg,
                             const std::vector<std::vector<double>>& wait_bound);

// Convenience envelope for the config's own menus.
std::vector<std::vector<double>> design_wait_bounds(
    const MultimodalNetwork& net, const DesignConfig& cfg);

// Reads the binary block of a solution vector back into a decision.
DesignDecision decode_design(const DesignMilp& milp,
                             const std::vector<double>& x);
// Zero vector with the decision's binaries set; decode_design inverts it.
std::vector<double> encode_design(const DesignMilp& milp,
                                  const DesignDecision& d);

struct McCormickReport {
  bool exact = true;
  std::vector<std::string> violations;
};

// Checks every surrogate column against binary * wait on a solution with
// integral binaries.
McCormickReport validate_mccormick_exactness(const DesignMilp& milp,
                                             const std::vector<double>& x,
                                             double tol = 1e-6);

// Exact reference for small instances: walk the whole design space,
// evaluate each in-budget design with the assignment solver, and keep the
// best.  Designs that strand demand are counted as infeasible and skipped.
struct EnumerationResult {
  DesignDecision best;
  double objective = kInf;
  long in_budget = 0;
  long feasible = 0;
};

EnumerationResult solve_by_enumeration(const MultimodalNetwork& net,
                                       const DesignConfig& cfg);

}  // namespace modt
