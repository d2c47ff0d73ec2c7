#pragma once

#include <string>
#include <vector>

#include "modt/lp_model.hpp"
#include "modt/network.hpp"

namespace modt {

// Operating plan the passengers face: one boarding frequency per transit line
// (per minute, zero when the line is not run) and one vehicle fleet per zone.
// Vectors are indexed like network.lines() and network.zones().
struct ServiceDesign {
  std::vector<double> frequency;
  std::vector<double> fleet;
};

// Instance parameters that stay fixed while designs change.
struct AssignmentParams {
  std::vector<double> matching_rate;  // per zone, 1/(vehicle*minute)
  double value_of_time = 23.0;        // $/hour, converts fares to minutes
};

AssignmentParams uniform_params(const MultimodalNetwork& net,
                                double matching_rate,
                                double value_of_time = 23.0);

// Effective boarding rate per link under a design.  A finite positive value
// means flow on the link is capped at rate times the wait stock of its tail
// (transit frequency, or matching_rate*fleet of the tail's zone for road
// links leaving a waiting node).  +infinity marks links passengers take
// without waiting; zero marks links of unoperated lines, which carry no flow.
std::vector<double> link_rates(const MultimodalNetwork& net,
                               const ServiceDesign& design,
                               const AssignmentParams& params);

// Flow LP toward one destination: minimize sum(c_a v_a) + sum(W_i) subject
// to conservation at every node and v_a <= rate*W_i on links leaving waiting
// nodes.  Nodes and links that cannot reach the destination are left out, and
// the destination's own balance row is implied by the others and dropped, so
// the remaining rows are linearly independent.
struct DestinationLp {
  int destination = -1;          // node index of the destination centroid
  SolverModel model;
  std::vector<int> v_col;        // per link, -1 when excluded
  std::vector<int> w_col;        // per node, -1 off the waiting set
  std::vector<int> balance_row;  // per node, -1 for destination / excluded
  std::vector<int> limit_row;    // per link, -1 when no proportion row
  std::vector<double> rate;      // rates the rows were built with
  std::vector<char> in_lp_node;
  std::vector<char> in_lp_link;
};

DestinationLp build_assignment_lp(const MultimodalNetwork& net,
                                  const ServiceDesign& design,
                                  const AssignmentParams& params,
                                  int destination);

// Optimal strategy toward one destination: expected remaining cost per node,
// the links a passenger would board, flows and per-node wait stocks once the
// demand is loaded, and the objective split.
struct StrategySolution {
  int destination = -1;
  std::vector<double> node_value;  // minutes to destination, kInf unreachable
  std::vector<char> attractive;    // per link
  std::vector<double> node_rate;   // combined rate of the boarding race
  std::vector<double> flow;        // per link, passengers
  std::vector<double> wait;        // per node, passenger-minutes
  double cost_flow = 0.0;          // riding, walking and fares
  double wait_transit = 0.0;       // wait stock at transit boardings
  double wait_road = 0.0;          // wait stock at vehicle pickups
  double objective = 0.0;
};

// Label-setting solver: processes links in nondecreasing order of cost plus
// head value, accumulating boarding races at waiting nodes, then loads demand
// through the attractive links in topological order.  Requires strictly
// positive link costs; throws SolverError otherwise, and when an origin with
// demand cannot reach the destination.
StrategySolution solve_strategy(const MultimodalNetwork& net,
                                const ServiceDesign& design,
                                const AssignmentParams& params,
                                int destination);

// Same optimum through the simplex kernel; the cross-checking reference path.
StrategySolution solve_destination_lp(const MultimodalNetwork& net,
                                      const ServiceDesign& design,
                                      const AssignmentParams& params,
                                      int destination);

// Packages a strategy solution as a primal/dual pair for the destination LP.
// Running verify_lp_certificate on the result audits label-setting optimality
// against the explicit model.
LpResult strategy_certificate(const MultimodalNetwork& net,
                              const DestinationLp& lp,
                              const StrategySolution& s);

struct AssignmentSolution {
  std::vector<StrategySolution> per_destination;  // like net.destinations()
  double objective = 0.0;
  double cost_flow = 0.0;
  double wait_transit = 0.0;
  double wait_road = 0.0;
};

// Solves every destination independently and sums the pieces.  Destination
// solves run concurrently when parallel is set and OpenMP is compiled in;
// totals are reduced serially in destination order either way, so results do
// not depend on the schedule.
AssignmentSolution solve_assignment(const MultimodalNetwork& net,
                                    const ServiceDesign& design,
                                    const AssignmentParams& params,
                                    bool parallel = true);

// Percent of served trips by the link kinds their bundle traverses: road
// only, transit only, both, or walking links only.  Flows are decomposed
// into origin-to-destination bundles by always following the smallest usable
// link index, which makes the split deterministic.
struct ModeShares {
  double road = 0.0;
  double transit = 0.0;
  double multimodal = 0.0;
  double walk_only = 0.0;
};

ModeShares mode_shares(const AssignmentSolution& solution,
                       const MultimodalNetwork& net);

// Per-destination, per-node upper bounds on the optimal wait stock over every
// design built from the given fleet and frequency menus: the wait observed at
// the worst service level (all lines closed, minimum fleet) plus 10% safety,
// raised to the analytic cap of demand over the smallest boarding rate the
// node can ever face.  Indexed [destination order][node].
std::vector<std::vector<double>> wait_upper_bounds(
    const MultimodalNetwork& net, const AssignmentParams& params,
    const std::vector<double>& fleet_options,
    const std::vector<double>& frequency_options);

// Output writers used by the command-line front end.
void write_flows_csv(const std::string& path, const MultimodalNetwork& net,
                     const AssignmentSolution& solution);
void write_waits_csv(const std::string& path, const MultimodalNetwork& net,
                     const AssignmentSolution& solution);
std::string summary_json(const MultimodalNetwork& net,
                         const AssignmentSolution& solution);

}  // namespace modt
