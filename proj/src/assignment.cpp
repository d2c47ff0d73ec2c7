#include "modt/assignment.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <queue>
#include <unordered_map>
#include <utility>

#include "json.hpp"
#include "modt/common.hpp"
#include "modt/simplex.hpp"

namespace modt {

namespace {

void check_sizes(const MultimodalNetwork& net, const ServiceDesign& design,
                 const AssignmentParams& params) {
  if (design.frequency.size() != net.lines().size())
    throw DataError("design has " + std::to_string(design.frequency.size()) +
                    " line frequencies for " +
                    std::to_string(net.lines().size()) + " lines");
  if (design.fleet.size() != net.zones().size())
    throw DataError("design has " + std::to_string(design.fleet.size()) +
                    " zone fleets for " + std::to_string(net.zones().size()) +
                    " zones");
  if (params.matching_rate.size() != net.zones().size())
    throw DataError("params carry " +
                    std::to_string(params.matching_rate.size()) +
                    " matching rates for " +
                    std::to_string(net.zones().size()) + " zones");
}

// Nodes that can still reach the destination when only links with a positive
// rate are usable.
std::vector<char> reaches_via(const MultimodalNetwork& net,
                              const std::vector<double>& rates,
                              int destination) {
  std::vector<char> mark(net.nodes().size(), 0);
  std::deque<int> queue{destination};
  mark[destination] = 1;
  while (!queue.empty()) {
    int node = queue.front();
    queue.pop_front();
    for (int a : net.bs(node)) {
      if (rates[a] <= 0.0) continue;
      int tail = net.links()[a].from;
      if (!mark[tail]) {
        mark[tail] = 1;
        queue.push_back(tail);
      }
    }
  }
  return mark;
}

void require_served(const MultimodalNetwork& net, const std::vector<char>& ok,
                    const std::vector<double>& g, int destination) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0 && !ok[i])
      throw SolverError("destination " + net.nodes()[destination].id +
                        ": origin " + net.nodes()[i].id +
                        " cannot reach it under the current design");
  }
}

// Objective pieces shared by the label-setting and simplex paths.  The wait
// stock at a node is attributed to transit versus vehicle pickups in
// proportion to the boarded flows; when a positive stock carries no boarded
// flow the split falls back to the rate masses.
void fill_totals(const MultimodalNetwork& net, const std::vector<double>& rates,
                 const std::vector<double>& costs, StrategySolution& s) {
  s.cost_flow = 0.0;
  for (std::size_t a = 0; a < s.flow.size(); ++a)
    if (s.flow[a] != 0.0) s.cost_flow += costs[a] * s.flow[a];
  s.wait_transit = 0.0;
  s.wait_road = 0.0;
  double total_wait = 0.0;
  for (std::size_t i = 0; i < s.wait.size(); ++i) {
    if (s.wait[i] <= 0.0) continue;
    total_wait += s.wait[i];
    double transit_mass = 0.0, road_mass = 0.0;
    double transit_rate = 0.0, road_rate = 0.0;
    for (int a : net.fs(static_cast<int>(i))) {
      if (rates[a] <= 0.0 || rates[a] == kInf) continue;
      if (net.links()[a].kind == LinkKind::Transit) {
        transit_mass += s.flow[a];
        transit_rate += rates[a];
      } else {
        road_mass += s.flow[a];
        road_rate += rates[a];
      }
    }
    if (transit_mass + road_mass <= 1e-12) {
      transit_mass = transit_rate;
      road_mass = road_rate;
    }
    const double mass = transit_mass + road_mass;
    if (mass <= 0.0) continue;
    s.wait_transit += s.wait[i] * transit_mass / mass;
    s.wait_road += s.wait[i] * road_mass / mass;
  }
  s.objective = s.cost_flow + total_wait;
}

void format_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  out += buf;
}

}  // namespace

AssignmentParams uniform_params(const MultimodalNetwork& net,
                                double matching_rate, double value_of_time) {
  AssignmentParams params;
  params.matching_rate.assign(net.zones().size(), matching_rate);
  params.value_of_time = value_of_time;
  return params;
}

std::vector<double> link_rates(const MultimodalNetwork& net,
                               const ServiceDesign& design,
                               const AssignmentParams& params) {
  check_sizes(net, design, params);
  std::vector<double> rates(net.links().size(), kInf);
  for (std::size_t a = 0; a < net.links().size(); ++a) {
    const Link& link = net.links()[a];
    if (link.kind == LinkKind::Transit) {
      const double f = design.frequency[link.line];
      if (f <= 0.0)
        rates[a] = 0.0;
      else if (net.is_waiting(link.from))
        rates[a] = f;
    } else if (link.kind == LinkKind::Road && net.is_waiting(link.from)) {
      const int zone = net.nodes()[link.from].zone;
      const double rate = params.matching_rate[zone] * design.fleet[zone];
      rates[a] = rate > 0.0 ? rate : 0.0;
    }
  }
  return rates;
}

DestinationLp build_assignment_lp(const MultimodalNetwork& net,
                                  const ServiceDesign& design,
                                  const AssignmentParams& params,
                                  int destination) {
  const int n = static_cast<int>(net.nodes().size());
  const int m = static_cast<int>(net.links().size());
  DestinationLp lp;
  lp.destination = destination;
  lp.rate = link_rates(net, design, params);
  lp.in_lp_node = reaches_via(net, lp.rate, destination);
  const std::vector<double> g = net.g_vector(destination);
  require_served(net, lp.in_lp_node, g, destination);

  lp.in_lp_link.assign(m, 0);
  for (int a = 0; a < m; ++a) {
    const Link& link = net.links()[a];
    lp.in_lp_link[a] =
        lp.rate[a] > 0.0 && lp.in_lp_node[link.from] && lp.in_lp_node[link.to];
  }

  const std::vector<double> costs = net.costs(params.value_of_time);
  lp.v_col.assign(m, -1);
  lp.w_col.assign(n, -1);
  for (int a = 0; a < m; ++a) {
    if (!lp.in_lp_link[a]) continue;
    const Link& link = net.links()[a];
    lp.v_col[a] = lp.model.add_col("v[" + net.nodes()[link.from].id + ">" +
                                       net.nodes()[link.to].id + "#" +
                                       std::to_string(a) + "]",
                                   costs[a], 0.0, kInf);
  }
  for (int i = 0; i < n; ++i) {
    if (lp.in_lp_node[i] && net.is_waiting(i))
      lp.w_col[i] =
          lp.model.add_col("W[" + net.nodes()[i].id + "]", 1.0, 0.0, kInf);
  }

  lp.balance_row.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!lp.in_lp_node[i] || i == destination) continue;
    lp.balance_row[i] =
        lp.model.add_row("bal[" + net.nodes()[i].id + "]", RowSense::EQ, g[i]);
  }
  for (int a = 0; a < m; ++a) {
    if (lp.v_col[a] < 0) continue;
    const Link& link = net.links()[a];
    if (lp.balance_row[link.from] >= 0)
      lp.model.add_term(lp.balance_row[link.from], lp.v_col[a], 1.0);
    if (lp.balance_row[link.to] >= 0)
      lp.model.add_term(lp.balance_row[link.to], lp.v_col[a], -1.0);
  }

  lp.limit_row.assign(m, -1);
  for (int a = 0; a < m; ++a) {
    if (lp.v_col[a] < 0 || lp.rate[a] == kInf) continue;
    const Link& link = net.links()[a];
    lp.limit_row[a] = lp.model.add_row(
        "lim[" + net.nodes()[link.from].id + ">" + net.nodes()[link.to].id +
            "#" + std::to_string(a) + "]",
        RowSense::LE, 0.0);
    lp.model.add_term(lp.limit_row[a], lp.v_col[a], 1.0);
    lp.model.add_term(lp.limit_row[a], lp.w_col[link.from], -lp.rate[a]);
  }
  return lp;
}

StrategySolution solve_strategy(const MultimodalNetwork& net,
                                const ServiceDesign& design,
                                const AssignmentParams& params,
                                int destination) {
  const int n = static_cast<int>(net.nodes().size());
  const int m = static_cast<int>(net.links().size());
  const std::vector<double> rates = link_rates(net, design, params);
  const std::vector<double> costs = net.costs(params.value_of_time);
  for (int a = 0; a < m; ++a) {
    if (rates[a] > 0.0 && costs[a] <= 0.0)
      throw SolverError("link " + net.nodes()[net.links()[a].from].id + ">" +
                        net.nodes()[net.links()[a].to].id +
                        " has a nonpositive cost; the label-setting order "
                        "needs strictly positive link costs");
  }

  StrategySolution s;
  s.destination = destination;
  s.node_value.assign(n, kInf);
  s.attractive.assign(m, 0);
  s.node_rate.assign(n, 0.0);
  s.flow.assign(m, 0.0);
  s.wait.assign(n, 0.0);

  std::vector<double>& u = s.node_value;
  std::vector<double> numer(n, 1.0);  // wait numerator of the running race
  std::vector<std::vector<int>> race(n);
  std::vector<int> walk(n, -1);  // winning no-wait link after a collapse
  std::vector<char> processed(m, 0);

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  u[destination] = 0.0;
  for (int a : net.bs(destination))
    if (rates[a] > 0.0) heap.push({costs[a], a});

  while (!heap.empty()) {
    const auto [key, a] = heap.top();
    heap.pop();
    if (processed[a]) continue;
    const Link& link = net.links()[a];
    if (costs[a] + u[link.to] < key) continue;  // a fresher entry is queued
    processed[a] = 1;
    const int i = link.from;
    if (!(key < u[i])) continue;
    if (rates[a] == kInf) {
      // Immediate link: it beats the running race outright, so the race is
      // discarded and the node takes this link with certainty.
      for (int b : race[i]) s.attractive[b] = 0;
      race[i].clear();
      s.node_rate[i] = 0.0;
      numer[i] = 1.0;
      if (walk[i] >= 0) s.attractive[walk[i]] = 0;
      walk[i] = a;
      s.attractive[a] = 1;
      u[i] = key;
    } else {
      numer[i] += rates[a] * key;
      s.node_rate[i] += rates[a];
      u[i] = numer[i] / s.node_rate[i];
      race[i].push_back(a);
      s.attractive[a] = 1;
    }
    for (int b : net.bs(i))
      if (rates[b] > 0.0 && !processed[b]) heap.push({costs[b] + u[i], b});
  }

  const std::vector<double> g = net.g_vector(destination);
  std::vector<char> reachable(n, 0);
  for (int i = 0; i < n; ++i) reachable[i] = u[i] < kInf;
  require_served(net, reachable, g, destination);

  // Load demand through the attractive links, each node after all of its
  // attractive predecessors.
  std::vector<int> indeg(n, 0);
  for (int a = 0; a < m; ++a)
    if (s.attractive[a]) ++indeg[net.links()[a].to];
  std::deque<int> order;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) order.push_back(i);
  std::vector<double> inflow(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (i != destination && g[i] > 0.0) inflow[i] = g[i];
  int visited = 0;
  while (!order.empty()) {
    const int i = order.front();
    order.pop_front();
    ++visited;
    const double through = inflow[i];
    if (i != destination && through > 0.0) {
      if (walk[i] >= 0) {
        s.flow[walk[i]] += through;
        inflow[net.links()[walk[i]].to] += through;
      } else if (s.node_rate[i] > 0.0) {
        s.wait[i] = through / s.node_rate[i];
        for (int a : race[i]) {
          s.flow[a] = rates[a] * s.wait[i];
          inflow[net.links()[a].to] += s.flow[a];
        }
      } else {
        throw SolverError("destination " + net.nodes()[destination].id +
                          ": flow stranded at node " + net.nodes()[i].id);
      }
    }
    if (walk[i] >= 0 && --indeg[net.links()[walk[i]].to] == 0)
      order.push_back(net.links()[walk[i]].to);
    for (int a : race[i])
      if (--indeg[net.links()[a].to] == 0) order.push_back(net.links()[a].to);
  }
  if (visited != n)
    throw SolverError("destination " + net.nodes()[destination].id +
                      ": attractive links form a cycle");

  fill_totals(net, rates, costs, s);
  return s;
}

StrategySolution solve_destination_lp(const MultimodalNetwork& net,
                                      const ServiceDesign& design,
                                      const AssignmentParams& params,
                                      int destination) {
  const DestinationLp lp =
      build_assignment_lp(net, design, params, destination);
  StrategySolution s;
  s.destination = destination;
  s.node_value.assign(net.nodes().size(), kInf);
  s.attractive.assign(net.links().size(), 0);
  s.node_rate.assign(net.nodes().size(), 0.0);
  s.flow.assign(net.links().size(), 0.0);
  s.wait.assign(net.nodes().size(), 0.0);
  s.node_value[destination] = 0.0;
  if (lp.model.num_cols() == 0) return s;

  const LpResult res = solve_lp(lp.model);
  if (res.status != SolveStatus::Optimal)
    throw SolverError("destination " + net.nodes()[destination].id +
                      ": flow LP ended " + to_string(res.status));
  for (std::size_t a = 0; a < lp.v_col.size(); ++a)
    if (lp.v_col[a] >= 0) s.flow[a] = res.x[lp.v_col[a]];
  for (std::size_t i = 0; i < lp.w_col.size(); ++i)
    if (lp.w_col[i] >= 0) s.wait[i] = res.x[lp.w_col[i]];
  for (std::size_t i = 0; i < lp.balance_row.size(); ++i)
    if (lp.balance_row[i] >= 0)
      s.node_value[i] = res.row_dual[lp.balance_row[i]];
  for (std::size_t a = 0; a < lp.v_col.size(); ++a) {
    if (lp.v_col[a] >= 0 && s.flow[a] > 1e-9) {
      s.attractive[a] = 1;
      if (lp.limit_row[a] >= 0)
        s.node_rate[net.links()[a].from] += lp.rate[a];
    }
  }
  const std::vector<double> costs = net.costs(params.value_of_time);
  fill_totals(net, lp.rate, costs, s);
  return s;
}

LpResult strategy_certificate(const MultimodalNetwork& net,
                              const DestinationLp& lp,
                              const StrategySolution& s) {
  LpResult res;
  res.status = SolveStatus::Optimal;
  res.objective = s.objective;
  res.x.assign(lp.model.num_cols(), 0.0);
  res.row_dual.assign(lp.model.num_rows(), 0.0);
  res.reduced_cost.assign(lp.model.num_cols(), 0.0);
  for (std::size_t a = 0; a < lp.v_col.size(); ++a)
    if (lp.v_col[a] >= 0) res.x[lp.v_col[a]] = s.flow[a];
  for (std::size_t i = 0; i < lp.w_col.size(); ++i)
    if (lp.w_col[i] >= 0) res.x[lp.w_col[i]] = s.wait[i];
  for (std::size_t i = 0; i < lp.balance_row.size(); ++i)
    if (lp.balance_row[i] >= 0) res.row_dual[lp.balance_row[i]] = s.node_value[i];

  // Each proportion row is priced at the clipped label deficit of its link,
  // min(0, c_a - u_i + u_j).  That keeps every flow column dual-feasible and
  // prices each wait column at one minus the deficit mass of its race, which
  // the label recursion keeps nonnegative.
  std::vector<double> wait_reduced(lp.w_col.size(), 1.0);
  for (std::size_t a = 0; a < lp.v_col.size(); ++a) {
    if (lp.v_col[a] < 0) continue;
    const Link& link = net.links()[a];
    const double drop = lp.model.obj[lp.v_col[a]] - s.node_value[link.from] +
                        s.node_value[link.to];
    if (lp.limit_row[a] >= 0) {
      const double price = std::min(0.0, drop);
      res.row_dual[lp.limit_row[a]] = price;
      res.reduced_cost[lp.v_col[a]] = drop - price;
      wait_reduced[link.from] += price * lp.rate[a];
    } else {
      res.reduced_cost[lp.v_col[a]] = drop;
    }
  }
  for (std::size_t i = 0; i < lp.w_col.size(); ++i)
    if (lp.w_col[i] >= 0) res.reduced_cost[lp.w_col[i]] = wait_reduced[i];
  return res;
}

AssignmentSolution solve_assignment(const MultimodalNetwork& net,
                                    const ServiceDesign& design,
                                    const AssignmentParams& params,
                                    bool parallel) {
  const std::vector<int>& dests = net.destinations();
  AssignmentSolution sum;
  sum.per_destination.resize(dests.size());
  std::vector<std::string> errors(dests.size());
  auto run_one = [&](int d) {
    try {
      sum.per_destination[d] = solve_strategy(net, design, params, dests[d]);
    } catch (const std::exception& e) {
      errors[d] = e.what();
    }
  };
#ifdef MODT_USE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int d = 0; d < static_cast<int>(dests.size()); ++d) run_one(d);
  } else {
    for (int d = 0; d < static_cast<int>(dests.size()); ++d) run_one(d);
  }
#else
  (void)parallel;
  for (int d = 0; d < static_cast<int>(dests.size()); ++d) run_one(d);
#endif
  for (const std::string& err : errors)
    if (!err.empty()) throw SolverError(err);
  for (const StrategySolution& s : sum.per_destination) {
    sum.objective += s.objective;
    sum.cost_flow += s.cost_flow;
    sum.wait_transit += s.wait_transit;
    sum.wait_road += s.wait_road;
  }
  return sum;
}

ModeShares mode_shares(const AssignmentSolution& solution,
                       const MultimodalNetwork& net) {
  double road = 0.0, transit = 0.0, multi = 0.0, walk_only = 0.0;
  for (const StrategySolution& s : solution.per_destination) {
    if (s.destination < 0) continue;
    const std::vector<double> g = net.g_vector(s.destination);
    const double demand = -std::min(0.0, g[s.destination]);
    const double eps = 1e-9 * (1.0 + demand);
    std::vector<double> residual = s.flow;
    for (std::size_t o = 0; o < g.size(); ++o) {
      if (g[o] <= 0.0) continue;
      double remaining = g[o];
      long guard = 0;
      while (remaining > eps) {
        if (++guard > 1000000)
          throw SolverError("flow decomposition for destination " +
                            net.nodes()[s.destination].id +
                            " did not terminate");
        // Trace one bundle from the origin, always taking the smallest
        // usable link; loops are cancelled as they close.
        std::vector<int> path;
        std::vector<int> nodes_on_path{static_cast<int>(o)};
        std::unordered_map<int, std::size_t> seen{{static_cast<int>(o), 0}};
        int cur = static_cast<int>(o);
        while (cur != s.destination) {
          int pick = -1;
          for (int a : net.fs(cur)) {
            if (residual[a] > eps) {
              pick = a;
              break;
            }
          }
          if (pick < 0)
            throw SolverError("flow decomposition stuck at node " +
                              net.nodes()[cur].id + " toward " +
                              net.nodes()[s.destination].id);
          const int next = net.links()[pick].to;
          const auto hit = seen.find(next);
          if (hit != seen.end()) {
            double cancel = residual[pick];
            for (std::size_t t = hit->second; t < path.size(); ++t)
              cancel = std::min(cancel, residual[path[t]]);
            residual[pick] -= cancel;
            for (std::size_t t = hit->second; t < path.size(); ++t)
              residual[path[t]] -= cancel;
            for (std::size_t t = hit->second + 1; t < nodes_on_path.size();
                 ++t)
              seen.erase(nodes_on_path[t]);
            path.resize(hit->second);
            nodes_on_path.resize(hit->second + 1);
            cur = next;
            continue;
          }
          path.push_back(pick);
          nodes_on_path.push_back(next);
          seen.emplace(next, path.size());
          cur = next;
        }
        double bundle = remaining;
        bool has_road = false, has_transit = false;
        for (int a : path) {
          bundle = std::min(bundle, residual[a]);
          if (net.links()[a].kind == LinkKind::Road) has_road = true;
          if (net.links()[a].kind == LinkKind::Transit) has_transit = true;
        }
        for (int a : path) residual[a] -= bundle;
        remaining -= bundle;
        if (has_road && has_transit)
          multi += bundle;
        else if (has_road)
          road += bundle;
        else if (has_transit)
          transit += bundle;
        else
          walk_only += bundle;
      }
    }
  }
  const double served = road + transit + multi + walk_only;
  ModeShares shares;
  if (served > 0.0) {
    shares.road = 100.0 * road / served;
    shares.transit = 100.0 * transit / served;
    shares.multimodal = 100.0 * multi / served;
    shares.walk_only = 100.0 * walk_only / served;
  }
  return shares;
}

std::vector<std::vector<double>> wait_upper_bounds(
    const MultimodalNetwork& net, const AssignmentParams& params,
    const std::vector<double>& fleet_options,
    const std::vector<double>& frequency_options) {
  if (fleet_options.empty() || frequency_options.empty())
    throw DataError("wait bounds need nonempty fleet and frequency menus");
  const double min_fleet =
      *std::min_element(fleet_options.begin(), fleet_options.end());
  const double min_frequency =
      *std::min_element(frequency_options.begin(), frequency_options.end());
  if (min_fleet <= 0.0 || min_frequency <= 0.0)
    throw DataError("fleet and frequency menu entries must be positive");

  ServiceDesign worst;
  worst.frequency.assign(net.lines().size(), 0.0);
  worst.fleet.assign(net.zones().size(), min_fleet);

  const std::vector<int>& dests = net.destinations();
  std::vector<std::vector<double>> bounds(
      dests.size(), std::vector<double>(net.nodes().size(), 0.0));
  for (std::size_t d = 0; d < dests.size(); ++d) {
    const int k = dests[d];
    const StrategySolution worst_case = solve_strategy(net, worst, params, k);
    const std::vector<double> g = net.g_vector(k);
    const double demand = -std::min(0.0, g[k]);
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
      if (!net.is_waiting(static_cast<int>(i))) continue;
      // Smallest boarding rate the node can ever face across the menus.
      double min_rate = kInf;
      for (int a : net.fs(static_cast<int>(i))) {
        const LinkKind kind = net.links()[a].kind;
        if (kind == LinkKind::Road) {
          const int zone = net.nodes()[i].zone;
          min_rate =
              std::min(min_rate, params.matching_rate[zone] * min_fleet);
        } else if (kind == LinkKind::Transit) {
          min_rate = std::min(min_rate, min_frequency);
        }
      }
      double bound = 1.1 * worst_case.wait[i];
      if (min_rate < kInf) bound = std::max(bound, demand / min_rate);
      bounds[d][i] = bound;
    }
  }
  return bounds;
}

void write_flows_csv(const std::string& path, const MultimodalNetwork& net,
                     const AssignmentSolution& solution) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  std::string text = "fromNodeId,toNodeId,destination,flow\n";
  for (const StrategySolution& s : solution.per_destination) {
    if (s.destination < 0) continue;
    const std::string& dest_zone =
        net.zones()[net.nodes()[s.destination].zone].id;
    for (std::size_t a = 0; a < s.flow.size(); ++a) {
      if (s.flow[a] <= 1e-12) continue;
      const Link& link = net.links()[a];
      text += net.nodes()[link.from].id;
      text += ',';
      text += net.nodes()[link.to].id;
      text += ',';
      text += dest_zone;
      text += ',';
      format_number(text, s.flow[a]);
      text += '\n';
    }
  }
  out << text;
}

void write_waits_csv(const std::string& path, const MultimodalNetwork& net,
                     const AssignmentSolution& solution) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  std::string text = "nodeId,destination,wait\n";
  for (const StrategySolution& s : solution.per_destination) {
    if (s.destination < 0) continue;
    const std::string& dest_zone =
        net.zones()[net.nodes()[s.destination].zone].id;
    for (std::size_t i = 0; i < s.wait.size(); ++i) {
      if (s.wait[i] <= 1e-12) continue;
      text += net.nodes()[i].id;
      text += ',';
      text += dest_zone;
      text += ',';
      format_number(text, s.wait[i]);
      text += '\n';
    }
  }
  out << text;
}

std::string summary_json(const MultimodalNetwork& net,
                         const AssignmentSolution& solution) {
  const ModeShares shares = mode_shares(solution, net);
  nlohmann::json j;
  j["objective"] = solution.objective;
  j["cost_in_vehicle_and_walk"] = solution.cost_flow;
  j["wait_transit"] = solution.wait_transit;
  j["wait_road"] = solution.wait_road;
  j["total_trips"] = net.total_trips();
  j["destinations"] = solution.per_destination.size();
  j["shares"]["road"] = shares.road;
  j["shares"]["transit"] = shares.transit;
  j["shares"]["multimodal"] = shares.multimodal;
  j["shares"]["walk_only"] = shares.walk_only;
  return j.dump(2);
}

}  // namespace modt
