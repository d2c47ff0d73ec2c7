#include "modt/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "modt/milp.hpp"
#include "modt/simplex.hpp"

namespace modt {

namespace {

constexpr double kDualTol = 1e-7;   // completion acceptance threshold
constexpr double kTightTol = 1e-6;  // cut activity threshold in the master

// A link propagates node prices when its flow column has no limit-row dual
// to absorb a price gap, or when the chosen duals deliberately leave that
// absorber at zero: every link except closed-line boardings.
bool propagates_prices(const MultimodalNetwork& net, const DesignDecision& d,
                       int a) {
  const Link& link = net.links()[a];
  if (link.kind != LinkKind::Transit) return true;
  if (!net.is_waiting(link.from)) return true;
  return d.frequency_choice[link.line] >= 0;
}

bool has_boarding_row(const MultimodalNetwork& net, int a) {
  const Link& link = net.links()[a];
  return link.kind == LinkKind::Transit && net.is_waiting(link.from);
}

bool has_pickup_row(const MultimodalNetwork& net, int a) {
  const Link& link = net.links()[a];
  return link.kind == LinkKind::Road && net.is_waiting(link.from);
}

bool is_waiting_road_node(const MultimodalNetwork& net, int i) {
  return net.is_waiting(i) &&
         net.nodes()[i].kind == NodeKind::RoadIntersection;
}

// Prices for nodes the fixed design cuts off from the destination.  They
// still carry balance rows (with zero supply), so their duals only need to
// respect the links without absorbing limit rows.  The largest lower bound
// reachable from priced territory keeps those constraints satisfied while
// staying small enough not to distort the boardings of priced nodes.
void price_severed_nodes(const MultimodalNetwork& net,
                         const DesignDecision& decision,
                         const std::vector<double>& cost,
                         std::vector<double>& mu,
                         const std::vector<char>& priced) {
  const int nn = static_cast<int>(net.nodes().size());
  std::vector<double> best(nn, 0.0);
  std::priority_queue<std::pair<double, int>> heap;
  for (std::size_t a = 0; a < net.links().size(); ++a) {
    if (!propagates_prices(net, decision, static_cast<int>(a))) continue;
    const Link& link = net.links()[a];
    if (priced[link.from] && !priced[link.to])
      heap.push({mu[link.from] - cost[a], link.to});
  }
  std::vector<char> settled(nn, 0);
  while (!heap.empty()) {
    const auto [value, i] = heap.top();
    heap.pop();
    if (settled[i] || priced[i]) continue;
    settled[i] = 1;
    best[i] = std::max(0.0, value);
    for (int a : net.fs(i)) {
      if (!propagates_prices(net, decision, a)) continue;
      const int head = net.links()[a].to;
      if (!priced[head] && !settled[head])
        heap.push({best[i] - cost[a], head});
    }
  }
  for (int i = 0; i < nn; ++i)
    if (!priced[i]) mu[i] = best[i];
}

// Closed-form dual completion from a label-setting solution.  Boarding and
// pickup rows price the clipped label deficit of their link; the chosen
// frequency or fleet option carries the matching envelope dual so the wait
// columns price to at most one, with equality wherever the wait is positive.
SubproblemDuals complete_duals(const MultimodalNetwork& net,
                               const DesignConfig& cfg,
                               const DesignDecision& decision,
                               const std::vector<double>& cost,
                               const std::vector<double>& freq_min,
                               const StrategySolution& s) {
  const int nn = static_cast<int>(net.nodes().size());
  const int na = static_cast<int>(net.links().size());
  const int nf = static_cast<int>(cfg.theta.size());
  const int nom = static_cast<int>(cfg.omega.size());

  SubproblemDuals d;
  d.destination = s.destination;
  d.mu.assign(nn, 0.0);
  d.lambda1.assign(na, 0.0);
  d.lambda2.assign(static_cast<std::size_t>(na) * nf, 0.0);
  d.lambda3.assign(static_cast<std::size_t>(na) * nf, 0.0);
  d.lambda4.assign(static_cast<std::size_t>(na) * nf, 0.0);
  d.lambda5.assign(na, 0.0);
  d.lambda6.assign(static_cast<std::size_t>(nn) * nom, 0.0);
  d.lambda7.assign(static_cast<std::size_t>(nn) * nom, 0.0);
  d.lambda8.assign(static_cast<std::size_t>(nn) * nom, 0.0);

  std::vector<char> priced(nn, 0);
  for (int i = 0; i < nn; ++i) {
    if (s.node_value[i] < kInf) {
      priced[i] = 1;
      d.mu[i] = s.node_value[i];
    }
  }
  price_severed_nodes(net, decision, cost, d.mu, priced);

  for (int a = 0; a < na; ++a) {
    const Link& link = net.links()[a];
    const double drop = cost[a] - d.mu[link.from] + d.mu[link.to];
    if (has_boarding_row(net, a)) {
      const double l1 = std::min(0.0, drop);
      d.lambda1[a] = l1;
      const int open = decision.frequency_choice[link.line];
      for (int f = 0; f < nf; ++f) {
        if (f == open)
          d.lambda4[static_cast<std::size_t>(a) * nf + f] = -freq_min[f] * l1;
        else
          d.lambda3[static_cast<std::size_t>(a) * nf + f] = freq_min[f] * l1;
      }
    } else if (has_pickup_row(net, a)) {
      d.lambda5[a] = std::min(0.0, drop);
    }
  }

  for (int i = 0; i < nn; ++i) {
    if (!is_waiting_road_node(net, i)) continue;
    const int zone = net.nodes()[i].zone;
    const double match = cfg.params.matching_rate[zone];
    double sum5 = 0.0;
    for (int a : net.fs(i))
      if (net.links()[a].kind == LinkKind::Road) sum5 += d.lambda5[a];
    const int chosen = decision.fleet_choice[zone];
    for (int n = 0; n < nom; ++n) {
      const double mass = match * cfg.omega[n] * sum5;
      if (n == chosen)
        d.lambda8[static_cast<std::size_t>(i) * nom + n] = -mass;
      else
        d.lambda7[static_cast<std::size_t>(i) * nom + n] = mass;
    }
  }
  return d;
}

// Value of the dual objective under the fixed design; equals the primal
// optimum for an optimal dual solution.
double dual_objective(const MultimodalNetwork& net, const DesignConfig& cfg,
                      const std::vector<double>& wait_bound_row,
                      const DesignDecision& decision,
                      const SubproblemDuals& d) {
  const int nf = static_cast<int>(cfg.theta.size());
  const int nom = static_cast<int>(cfg.omega.size());
  const std::vector<double> g = net.g_vector(d.destination);
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (static_cast<int>(i) != d.destination) total += d.mu[i] * g[i];
  for (std::size_t a = 0; a < net.links().size(); ++a) {
    if (!has_boarding_row(net, static_cast<int>(a))) continue;
    const Link& link = net.links()[a];
    const double wb = wait_bound_row[link.from];
    const int open = decision.frequency_choice[link.line];
    for (int f = 0; f < nf; ++f) {
      const double yhat = f == open ? 1.0 : 0.0;
      total += d.lambda2[a * nf + f] * wb * (1.0 - yhat) +
               d.lambda3[a * nf + f] * wb * yhat;
    }
  }
  for (std::size_t i = 0; i < net.nodes().size(); ++i) {
    if (!is_waiting_road_node(net, static_cast<int>(i))) continue;
    const double wb = wait_bound_row[i];
    const int chosen = decision.fleet_choice[net.nodes()[i].zone];
    for (int n = 0; n < nom; ++n) {
      const double nhat = n == chosen ? 1.0 : 0.0;
      total += d.lambda6[i * nom + n] * wb * (1.0 - nhat) +
               d.lambda7[i * nom + n] * wb * nhat;
    }
  }
  return total;
}

std::uint64_t hash_decision(const DesignDecision& d) {
  std::uint64_t h = fnv1a64(d.frequency_choice.data(),
                            d.frequency_choice.size() * sizeof(int));
  return fnv1a64(d.fleet_choice.data(), d.fleet_choice.size() * sizeof(int),
                 h);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

SubproblemDuals solve_subproblem_lp(
    const MultimodalNetwork& net, const DesignConfig& cfg,
    const std::vector<std::vector<double>>& wait_bound,
    const DesignDecision& decision, int destination, double* objective_out) {
  cfg.validate(net);
  const std::vector<int>& dests = net.destinations();
  const auto pos = std::find(dests.begin(), dests.end(), destination);
  if (pos == dests.end())
    throw DataError("node index " + std::to_string(destination) +
                    " is not a demand destination");
  const std::vector<double>& wb = wait_bound.at(pos - dests.begin());

  const int nn = static_cast<int>(net.nodes().size());
  const int na = static_cast<int>(net.links().size());
  const int nf = static_cast<int>(cfg.theta.size());
  const int nom = static_cast<int>(cfg.omega.size());
  const std::vector<double> cost = net.costs(cfg.params.value_of_time);
  const std::vector<double> freq_min = frequencies_per_minute(cfg);

  SolverModel m;
  std::vector<int> v_col(na), w_col(nn, -1);
  for (int a = 0; a < na; ++a)
    v_col[a] = m.add_col("v" + std::to_string(a), cost[a], 0.0, kInf);
  for (int i = 0; i < nn; ++i)
    if (net.is_waiting(i))
      w_col[i] = m.add_col("W" + std::to_string(i), 1.0, 0.0, kInf);
  std::vector<int> t_col(static_cast<std::size_t>(na) * nf, -1);
  for (int a = 0; a < na; ++a) {
    if (!has_boarding_row(net, a)) continue;
    for (int f = 0; f < nf; ++f)
      t_col[static_cast<std::size_t>(a) * nf + f] = m.add_col(
          "t" + std::to_string(a) + "_" + std::to_string(f), 0.0, 0.0, kInf);
  }
  std::vector<int> o_col(static_cast<std::size_t>(nn) * nom, -1);
  for (int i = 0; i < nn; ++i) {
    if (!is_waiting_road_node(net, i)) continue;
    for (int n = 0; n < nom; ++n)
      o_col[static_cast<std::size_t>(i) * nom + n] = m.add_col(
          "o" + std::to_string(i) + "_" + std::to_string(n), 0.0, 0.0, kInf);
  }

  const std::vector<double> g = net.g_vector(destination);
  std::vector<int> bal_row(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (i == destination) continue;
    bal_row[i] = m.add_row("bal" + std::to_string(i), RowSense::EQ, g[i]);
  }
  for (int a = 0; a < na; ++a) {
    const Link& link = net.links()[a];
    if (bal_row[link.from] >= 0) m.add_term(bal_row[link.from], v_col[a], 1.0);
    if (bal_row[link.to] >= 0) m.add_term(bal_row[link.to], v_col[a], -1.0);
  }

  std::vector<int> board_row(na, -1), pickup_row(na, -1);
  std::vector<int> t_hi(t_col.size(), -1), t_cap(t_col.size(), -1),
      t_floor(t_col.size(), -1);
  for (int a = 0; a < na; ++a) {
    if (!has_boarding_row(net, a)) continue;
    const Link& link = net.links()[a];
    const int wcol = w_col[link.from];
    const double bound = wb[link.from];
    board_row[a] = m.add_row("board" + std::to_string(a), RowSense::LE, 0.0);
    m.add_term(board_row[a], v_col[a], 1.0);
    const int open = decision.frequency_choice[link.line];
    for (int f = 0; f < nf; ++f) {
      const std::size_t idx = static_cast<std::size_t>(a) * nf + f;
      m.add_term(board_row[a], t_col[idx], -freq_min[f]);
      const double yhat = f == open ? 1.0 : 0.0;
      const std::string tag = std::to_string(a) + "_" + std::to_string(f);
      t_hi[idx] = m.add_row("thi" + tag, RowSense::LE, bound * (1.0 - yhat));
      m.add_term(t_hi[idx], wcol, 1.0);
      m.add_term(t_hi[idx], t_col[idx], -1.0);
      t_cap[idx] = m.add_row("tcap" + tag, RowSense::LE, bound * yhat);
      m.add_term(t_cap[idx], t_col[idx], 1.0);
      t_floor[idx] = m.add_row("tfloor" + tag, RowSense::GE, 0.0);
      m.add_term(t_floor[idx], wcol, 1.0);
      m.add_term(t_floor[idx], t_col[idx], -1.0);
    }
  }
  std::vector<int> o_hi(o_col.size(), -1), o_cap(o_col.size(), -1),
      o_floor(o_col.size(), -1);
  for (int i = 0; i < nn; ++i) {
    if (!is_waiting_road_node(net, i)) continue;
    const int zone = net.nodes()[i].zone;
    const double match = cfg.params.matching_rate[zone];
    const int chosen = decision.fleet_choice[zone];
    const int wcol = w_col[i];
    const double bound = wb[i];
    for (int n = 0; n < nom; ++n) {
      const std::size_t idx = static_cast<std::size_t>(i) * nom + n;
      const double nhat = n == chosen ? 1.0 : 0.0;
      const std::string tag = std::to_string(i) + "_" + std::to_string(n);
      o_hi[idx] = m.add_row("ohi" + tag, RowSense::LE, bound * (1.0 - nhat));
      m.add_term(o_hi[idx], wcol, 1.0);
      m.add_term(o_hi[idx], o_col[idx], -1.0);
      o_cap[idx] = m.add_row("ocap" + tag, RowSense::LE, bound * nhat);
      m.add_term(o_cap[idx], o_col[idx], 1.0);
      o_floor[idx] = m.add_row("ofloor" + tag, RowSense::GE, 0.0);
      m.add_term(o_floor[idx], wcol, 1.0);
      m.add_term(o_floor[idx], o_col[idx], -1.0);
    }
    for (int a : net.fs(i)) {
      if (net.links()[a].kind != LinkKind::Road) continue;
      pickup_row[a] =
          m.add_row("pickup" + std::to_string(a), RowSense::LE, 0.0);
      m.add_term(pickup_row[a], v_col[a], 1.0);
      for (int n = 0; n < nom; ++n)
        m.add_term(pickup_row[a],
                   o_col[static_cast<std::size_t>(i) * nom + n],
                   -match * cfg.omega[n]);
    }
  }

  const LpResult res = solve_lp(m);
  if (res.status != SolveStatus::Optimal)
    throw SolverError("fixed-design subproblem for destination " +
                      net.nodes()[destination].id + " ended " +
                      to_string(res.status));
  if (objective_out) *objective_out = res.objective;

  SubproblemDuals d;
  d.destination = destination;
  d.mu.assign(nn, 0.0);
  d.lambda1.assign(na, 0.0);
  d.lambda2.assign(t_col.size(), 0.0);
  d.lambda3.assign(t_col.size(), 0.0);
  d.lambda4.assign(t_col.size(), 0.0);
  d.lambda5.assign(na, 0.0);
  d.lambda6.assign(o_col.size(), 0.0);
  d.lambda7.assign(o_col.size(), 0.0);
  d.lambda8.assign(o_col.size(), 0.0);
  for (int i = 0; i < nn; ++i)
    if (bal_row[i] >= 0) d.mu[i] = res.row_dual[bal_row[i]];
  for (int a = 0; a < na; ++a) {
    if (board_row[a] >= 0) d.lambda1[a] = res.row_dual[board_row[a]];
    if (pickup_row[a] >= 0) d.lambda5[a] = res.row_dual[pickup_row[a]];
  }
  for (std::size_t idx = 0; idx < t_col.size(); ++idx) {
    if (t_col[idx] < 0) continue;
    d.lambda2[idx] = res.row_dual[t_hi[idx]];
    d.lambda3[idx] = res.row_dual[t_cap[idx]];
    d.lambda4[idx] = res.row_dual[t_floor[idx]];
  }
  for (std::size_t idx = 0; idx < o_col.size(); ++idx) {
    if (o_col[idx] < 0) continue;
    d.lambda6[idx] = res.row_dual[o_hi[idx]];
    d.lambda7[idx] = res.row_dual[o_cap[idx]];
    d.lambda8[idx] = res.row_dual[o_floor[idx]];
  }
  return d;
}

double check_subproblem_duals(const MultimodalNetwork& net,
                              const DesignConfig& cfg,
                              const SubproblemDuals& d) {
  const int nn = static_cast<int>(net.nodes().size());
  const int na = static_cast<int>(net.links().size());
  const int nf = static_cast<int>(cfg.theta.size());
  const int nom = static_cast<int>(cfg.omega.size());
  const std::vector<double> cost = net.costs(cfg.params.value_of_time);
  const std::vector<double> freq_min = frequencies_per_minute(cfg);
  double worst = 0.0;
  const auto note = [&worst](double violation, double scale) {
    worst = std::max(worst, violation / (1.0 + scale));
  };

  for (int a = 0; a < na; ++a) {
    note(std::max(0.0, d.lambda1[a]), std::fabs(d.lambda1[a]));
    note(std::max(0.0, d.lambda5[a]), std::fabs(d.lambda5[a]));
  }
  for (std::size_t idx = 0; idx < d.lambda2.size(); ++idx) {
    note(std::max(0.0, d.lambda2[idx]), std::fabs(d.lambda2[idx]));
    note(std::max(0.0, d.lambda3[idx]), std::fabs(d.lambda3[idx]));
    note(std::max(0.0, -d.lambda4[idx]), std::fabs(d.lambda4[idx]));
  }
  for (std::size_t idx = 0; idx < d.lambda6.size(); ++idx) {
    note(std::max(0.0, d.lambda6[idx]), std::fabs(d.lambda6[idx]));
    note(std::max(0.0, d.lambda7[idx]), std::fabs(d.lambda7[idx]));
    note(std::max(0.0, -d.lambda8[idx]), std::fabs(d.lambda8[idx]));
  }

  // Flow columns: price gap across the link plus its limit-row duals.
  for (int a = 0; a < na; ++a) {
    const Link& link = net.links()[a];
    const double mu_i = link.from == d.destination ? 0.0 : d.mu[link.from];
    const double mu_j = link.to == d.destination ? 0.0 : d.mu[link.to];
    double lhs = mu_i - mu_j;
    if (has_boarding_row(net, a)) lhs += d.lambda1[a];
    if (has_pickup_row(net, a)) lhs += d.lambda5[a];
    note(std::max(0.0, lhs - cost[a]),
         std::fabs(mu_i) + std::fabs(mu_j) + std::fabs(cost[a]));
  }

  // Wait columns: the envelope duals may not price above the unit objective.
  for (int i = 0; i < nn; ++i) {
    if (!net.is_waiting(i)) continue;
    double lhs = 0.0;
    double scale = 1.0;
    for (int a : net.fs(i)) {
      if (!has_boarding_row(net, a)) continue;
      for (int f = 0; f < nf; ++f) {
        const std::size_t idx = static_cast<std::size_t>(a) * nf + f;
        lhs += d.lambda2[idx] + d.lambda4[idx];
        scale += std::fabs(d.lambda2[idx]) + std::fabs(d.lambda4[idx]);
      }
    }
    if (is_waiting_road_node(net, i)) {
      for (int n = 0; n < nom; ++n) {
        const std::size_t idx = static_cast<std::size_t>(i) * nom + n;
        lhs += d.lambda6[idx] + d.lambda8[idx];
        scale += std::fabs(d.lambda6[idx]) + std::fabs(d.lambda8[idx]);
      }
    }
    note(std::max(0.0, lhs - 1.0), scale);
  }

  // Surrogate columns tie the limit-row duals to their envelopes.
  for (int a = 0; a < na; ++a) {
    if (!has_boarding_row(net, a)) continue;
    for (int f = 0; f < nf; ++f) {
      const std::size_t idx = static_cast<std::size_t>(a) * nf + f;
      const double lhs = -freq_min[f] * d.lambda1[a] - d.lambda2[idx] +
                         d.lambda3[idx] - d.lambda4[idx];
      note(std::max(0.0, lhs),
           freq_min[f] * std::fabs(d.lambda1[a]) + std::fabs(d.lambda2[idx]) +
               std::fabs(d.lambda3[idx]) + std::fabs(d.lambda4[idx]));
    }
  }
  for (int i = 0; i < nn; ++i) {
    if (!is_waiting_road_node(net, i)) continue;
    const int zone = net.nodes()[i].zone;
    const double match = cfg.params.matching_rate[zone];
    double sum5 = 0.0;
    for (int a : net.fs(i))
      if (net.links()[a].kind == LinkKind::Road) sum5 += d.lambda5[a];
    for (int n = 0; n < nom; ++n) {
      const std::size_t idx = static_cast<std::size_t>(i) * nom + n;
      const double lhs = -match * cfg.omega[n] * sum5 - d.lambda6[idx] +
                         d.lambda7[idx] - d.lambda8[idx];
      note(std::max(0.0, lhs),
           match * cfg.omega[n] * std::fabs(sum5) + std::fabs(d.lambda6[idx]) +
               std::fabs(d.lambda7[idx]) + std::fabs(d.lambda8[idx]));
    }
  }
  return worst;
}

SubproblemResult solve_subproblem(const MultimodalNetwork& net,
                                  const DesignConfig& cfg,
                                  const std::vector<std::vector<double>>& wait_bound,
                                  const DesignDecision& decision,
                                  bool parallel) {
  cfg.validate(net);
  const std::vector<int>& dests = net.destinations();
  if (wait_bound.size() != dests.size())
    throw DataError("wait bound table does not cover every destination");
  const ServiceDesign design = to_service_design(decision, cfg);
  const std::vector<double> cost = net.costs(cfg.params.value_of_time);
  const std::vector<double> freq_min = frequencies_per_minute(cfg);

  SubproblemResult out;
  out.assignment.per_destination.resize(dests.size());
  out.duals.resize(dests.size());
  std::vector<std::string> errors(dests.size());
  std::vector<char> fell_back(dests.size(), 0);

  auto run_one = [&](int k) {
    try {
      StrategySolution s =
          solve_strategy(net, design, cfg.params, dests[k]);
      SubproblemDuals d =
          complete_duals(net, cfg, decision, cost, freq_min, s);
      const double viol = check_subproblem_duals(net, cfg, d);
      const double gap = std::fabs(
          dual_objective(net, cfg, wait_bound[k], decision, d) - s.objective);
      if (viol > kDualTol || gap > kTightTol * (1.0 + std::fabs(s.objective))) {
        d = solve_subproblem_lp(net, cfg, wait_bound, decision, dests[k]);
        fell_back[k] = 1;
      }
      out.assignment.per_destination[k] = std::move(s);
      out.duals[k] = std::move(d);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  };
#ifdef MODT_USE_OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < static_cast<int>(dests.size()); ++k) run_one(k);
  } else {
    for (int k = 0; k < static_cast<int>(dests.size()); ++k) run_one(k);
  }
#else
  (void)parallel;
  for (int k = 0; k < static_cast<int>(dests.size()); ++k) run_one(k);
#endif
  for (const std::string& err : errors)
    if (!err.empty()) throw SolverError(err);
  for (const StrategySolution& s : out.assignment.per_destination) {
    out.assignment.objective += s.objective;
    out.assignment.cost_flow += s.cost_flow;
    out.assignment.wait_transit += s.wait_transit;
    out.assignment.wait_road += s.wait_road;
  }
  for (char f : fell_back) out.lp_fallbacks += f;
  return out;
}

double OptimalityCut::rhs_at(const DesignDecision& d) const {
  double total = constant;
  for (std::size_t l = 0; l < y_coef.size(); ++l) {
    const int c = d.frequency_choice[l];
    if (c >= 0) total += y_coef[l][c];
  }
  for (std::size_t z = 0; z < n_coef.size(); ++z)
    total += n_coef[z][d.fleet_choice[z]];
  return total;
}

std::uint64_t OptimalityCut::hash() const {
  std::uint64_t h = fnv1a64(&destination, sizeof destination);
  h = fnv1a64(&constant, sizeof constant, h);
  for (const auto& row : y_coef)
    h = fnv1a64(row.data(), row.size() * sizeof(double), h);
  for (const auto& row : n_coef)
    h = fnv1a64(row.data(), row.size() * sizeof(double), h);
  return h;
}

namespace {

// An option whose every completion puts the cut's right side below zero
// contributes nothing but enormous coefficients, so it is raised until its
// best completion lands exactly at zero.  Designs taking the option then
// face a vacuous bound, which the nonnegative destination cost satisfies,
// and the bound at every other design is unchanged.
void tighten_cut(OptimalityCut& cut) {
  std::vector<double> y_top(cut.y_coef.size(), 0.0);
  std::vector<double> n_top(cut.n_coef.size(), -kInf);
  double peak = cut.constant;
  for (std::size_t l = 0; l < cut.y_coef.size(); ++l) {
    for (double c : cut.y_coef[l]) y_top[l] = std::max(y_top[l], c);
    peak += y_top[l];
  }
  for (std::size_t z = 0; z < cut.n_coef.size(); ++z) {
    for (double c : cut.n_coef[z]) n_top[z] = std::max(n_top[z], c);
    peak += n_top[z];
  }
  for (std::size_t l = 0; l < cut.y_coef.size(); ++l)
    for (double& c : cut.y_coef[l]) {
      const double reach = peak - y_top[l] + c;
      if (reach < 0.0) c -= reach;
    }
  for (std::size_t z = 0; z < cut.n_coef.size(); ++z)
    for (double& c : cut.n_coef[z]) {
      const double reach = peak - n_top[z] + c;
      if (reach < 0.0) c -= reach;
    }
}

}  // namespace

OptimalityCut make_destination_cut(const MultimodalNetwork& net,
                                   const DesignConfig& cfg,
                                   const std::vector<double>& wait_bound_row,
                                   const SubproblemDuals& d) {
  const int nf = static_cast<int>(cfg.theta.size());
  const int nom = static_cast<int>(cfg.omega.size());
  OptimalityCut cut;
  cut.destination = d.destination;
  cut.y_coef.assign(net.lines().size(), std::vector<double>(nf, 0.0));
  cut.n_coef.assign(net.zones().size(), std::vector<double>(nom, 0.0));

  const std::vector<double> g = net.g_vector(d.destination);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (static_cast<int>(i) != d.destination) cut.constant += d.mu[i] * g[i];

  for (std::size_t a = 0; a < net.links().size(); ++a) {
    if (!has_boarding_row(net, static_cast<int>(a))) continue;
    const Link& link = net.links()[a];
    const double wb = wait_bound_row[link.from];
    for (int f = 0; f < nf; ++f) {
      const std::size_t idx = a * nf + f;
      cut.constant += wb * d.lambda2[idx];
      cut.y_coef[link.line][f] += wb * (d.lambda3[idx] - d.lambda2[idx]);
    }
  }
  for (std::size_t i = 0; i < net.nodes().size(); ++i) {
    if (!is_waiting_road_node(net, static_cast<int>(i))) continue;
    const int zone = net.nodes()[i].zone;
    const double wb = wait_bound_row[i];
    for (int n = 0; n < nom; ++n) {
      const std::size_t idx = i * nom + n;
      cut.constant += wb * d.lambda6[idx];
      cut.n_coef[zone][n] += wb * (d.lambda7[idx] - d.lambda6[idx]);
    }
  }
  tighten_cut(cut);
  return cut;
}

std::vector<OptimalityCut> make_disaggregated_cuts(
    const MultimodalNetwork& net, const DesignConfig& cfg,
    const std::vector<std::vector<double>>& wait_bound,
    const SubproblemResult& sp) {
  std::vector<OptimalityCut> cuts;
  cuts.reserve(sp.duals.size());
  for (std::size_t k = 0; k < sp.duals.size(); ++k)
    cuts.push_back(
        make_destination_cut(net, cfg, wait_bound[k], sp.duals[k]));
  return cuts;
}

OptimalityCut make_classic_cut(const MultimodalNetwork& net,
                               const DesignConfig& cfg,
                               const std::vector<std::vector<double>>& wait_bound,
                               const SubproblemResult& sp) {
  OptimalityCut cut;
  cut.destination = -1;
  cut.y_coef.assign(net.lines().size(),
                    std::vector<double>(cfg.theta.size(), 0.0));
  cut.n_coef.assign(net.zones().size(),
                    std::vector<double>(cfg.omega.size(), 0.0));
  for (std::size_t k = 0; k < sp.duals.size(); ++k) {
    const OptimalityCut part =
        make_destination_cut(net, cfg, wait_bound[k], sp.duals[k]);
    cut.constant += part.constant;
    for (std::size_t l = 0; l < cut.y_coef.size(); ++l)
      for (std::size_t f = 0; f < cut.y_coef[l].size(); ++f)
        cut.y_coef[l][f] += part.y_coef[l][f];
    for (std::size_t z = 0; z < cut.n_coef.size(); ++z)
      for (std::size_t n = 0; n < cut.n_coef[z].size(); ++n)
        cut.n_coef[z][n] += part.n_coef[z][n];
  }
  return cut;
}

std::vector<CliqueCut> make_clique_cuts(const DesignConfig& cfg,
                                        int num_zones) {
  std::vector<CliqueCut> cuts;
  if (!(cfg.fleet_budget < kInf)) return cuts;
  for (std::size_t n = 0; n < cfg.omega.size(); ++n) {
    const int limit =
        static_cast<int>(std::floor(cfg.fleet_budget / cfg.omega[n] + 1e-9));
    if (limit < num_zones) cuts.push_back({static_cast<int>(n), limit});
  }
  return cuts;
}

std::vector<CoverCut> make_cover_cuts(const MultimodalNetwork& net,
                                      const DesignConfig& cfg) {
  std::vector<CoverCut> cuts;
  if (!(cfg.bus_budget < kInf)) return cuts;
  const int nl = static_cast<int>(net.lines().size());
  for (std::size_t f = 0; f < cfg.theta.size(); ++f) {
    std::vector<std::pair<int, int>> sized(nl);  // (buses, line)
    for (int l = 0; l < nl; ++l)
      sized[l] = {buses_required(net, l, cfg.theta[f]), l};
    std::sort(sized.begin(), sized.end());
    std::vector<char> in_prefix(nl, 0);
    std::vector<std::pair<int, int>> prefix;  // (line, frequency index)
    double used = 0.0;
    for (const auto& [buses, l] : sized) {
      used += buses;
      if (used > cfg.bus_budget) break;
      in_prefix[l] = 1;
      prefix.push_back({l, static_cast<int>(f)});
    }
    for (int l = 0; l < nl; ++l) {
      if (in_prefix[l]) continue;
      CoverCut cut;
      cut.members = prefix;
      cut.members.push_back({l, static_cast<int>(f)});
      cuts.push_back(std::move(cut));
    }
  }
  return cuts;
}

namespace {

struct MasterModel {
  SolverModel model;
  std::vector<int> x_col;
  std::vector<std::vector<int>> y_col, n_col;
  std::vector<int> eta_col;  // one entry, or one per destination
  int first_cut_row = 0;
};

MasterModel build_master(const MultimodalNetwork& net, const DesignConfig& cfg,
                         bool aggregated,
                         const std::vector<CliqueCut>& cliques,
                         const std::vector<CoverCut>& covers,
                         const std::vector<OptimalityCut>& cuts) {
  const std::size_t nl = net.lines().size();
  const std::size_t nz = net.zones().size();
  const std::vector<int>& dests = net.destinations();
  MasterModel out;
  SolverModel& m = out.model;

  out.x_col.resize(nl);
  out.y_col.assign(nl, {});
  for (std::size_t l = 0; l < nl; ++l) {
    out.x_col[l] = m.add_col("x" + std::to_string(l), 0.0, 0.0, 1.0, true);
    out.y_col[l].resize(cfg.theta.size());
    for (std::size_t f = 0; f < cfg.theta.size(); ++f)
      out.y_col[l][f] = m.add_col(
          "y" + std::to_string(l) + "_" + std::to_string(f), 0.0, 0.0, 1.0,
          true);
  }
  out.n_col.assign(nz, {});
  for (std::size_t z = 0; z < nz; ++z) {
    out.n_col[z].resize(cfg.omega.size());
    for (std::size_t n = 0; n < cfg.omega.size(); ++n)
      out.n_col[z][n] = m.add_col(
          "N" + std::to_string(z) + "_" + std::to_string(n), 0.0, 0.0, 1.0,
          true);
  }
  if (aggregated) {
    out.eta_col.push_back(m.add_col("eta", 1.0, 0.0, kInf));
  } else {
    for (std::size_t k = 0; k < dests.size(); ++k)
      out.eta_col.push_back(
          m.add_col("eta" + std::to_string(k), 1.0, 0.0, kInf));
  }

  for (std::size_t l = 0; l < nl; ++l) {
    const int r =
        m.add_row("line_freq" + std::to_string(l), RowSense::EQ, 0.0);
    for (int col : out.y_col[l]) m.add_term(r, col, 1.0);
    m.add_term(r, out.x_col[l], -1.0);
  }
  for (std::size_t z = 0; z < nz; ++z) {
    const int r =
        m.add_row("fleet_pick" + std::to_string(z), RowSense::EQ, 1.0);
    for (int col : out.n_col[z]) m.add_term(r, col, 1.0);
  }
  if (cfg.bus_budget < kInf) {
    const int r = m.add_row("bus_budget", RowSense::LE, cfg.bus_budget);
    for (std::size_t l = 0; l < nl; ++l)
      for (std::size_t f = 0; f < cfg.theta.size(); ++f)
        m.add_term(r, out.y_col[l][f],
                   buses_required(net, static_cast<int>(l), cfg.theta[f]));
  }
  if (cfg.fleet_budget < kInf) {
    const int r = m.add_row("fleet_budget", RowSense::LE, cfg.fleet_budget);
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t n = 0; n < cfg.omega.size(); ++n)
        m.add_term(r, out.n_col[z][n], cfg.omega[n]);
  }
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const int r = m.add_row("clique" + std::to_string(c), RowSense::LE,
                            cliques[c].limit);
    for (std::size_t z = 0; z < nz; ++z)
      m.add_term(r, out.n_col[z][cliques[c].fleet_index], 1.0);
  }
  for (std::size_t c = 0; c < covers.size(); ++c) {
    const int r =
        m.add_row("cover" + std::to_string(c), RowSense::LE,
                  static_cast<double>(covers[c].members.size()) - 1.0);
    for (const auto& [l, f] : covers[c].members)
      m.add_term(r, out.y_col[l][f], 1.0);
  }

  out.first_cut_row = m.num_rows();
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const OptimalityCut& cut = cuts[c];
    int eta;
    if (cut.destination < 0) {
      if (!aggregated)
        throw DataError("aggregated cut offered to a per-destination master");
      eta = out.eta_col[0];
    } else {
      if (aggregated)
        throw DataError("per-destination cut offered to an aggregated master");
      const auto pos =
          std::find(dests.begin(), dests.end(), cut.destination);
      if (pos == dests.end())
        throw DataError("cut references a node that is not a destination");
      eta = out.eta_col[pos - dests.begin()];
    }
    // One expensive design would otherwise put a row of enormous
    // coefficients next to the unit-scale structural rows and poison the
    // conditioning of every master basis, so each bound row is divided by
    // its own magnitude; the constraint is unchanged.
    double s = std::max(1.0, std::fabs(cut.constant));
    for (const auto& row : cut.y_coef)
      for (double v : row) s = std::max(s, std::fabs(v));
    for (const auto& row : cut.n_coef)
      for (double v : row) s = std::max(s, std::fabs(v));
    const int r =
        m.add_row("cut" + std::to_string(c), RowSense::GE, cut.constant / s);
    m.add_term(r, eta, 1.0 / s);
    for (std::size_t l = 0; l < nl; ++l)
      for (std::size_t f = 0; f < cfg.theta.size(); ++f)
        if (cut.y_coef[l][f] != 0.0)
          m.add_term(r, out.y_col[l][f], -cut.y_coef[l][f] / s);
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t n = 0; n < cfg.omega.size(); ++n)
        if (cut.n_coef[z][n] != 0.0)
          m.add_term(r, out.n_col[z][n], -cut.n_coef[z][n] / s);
  }
  return out;
}

DesignDecision decode_master(const MasterModel& master,
                             const std::vector<double>& x) {
  DesignDecision d;
  d.frequency_choice.assign(master.y_col.size(), -1);
  d.fleet_choice.assign(master.n_col.size(), -1);
  for (std::size_t l = 0; l < master.y_col.size(); ++l)
    for (std::size_t f = 0; f < master.y_col[l].size(); ++f)
      if (x[master.y_col[l][f]] > 0.5) {
        if (d.frequency_choice[l] >= 0)
          throw SolverError("master selected two frequencies for one line");
        d.frequency_choice[l] = static_cast<int>(f);
      }
  for (std::size_t z = 0; z < master.n_col.size(); ++z)
    for (std::size_t n = 0; n < master.n_col[z].size(); ++n)
      if (x[master.n_col[z][n]] > 0.5) {
        if (d.fleet_choice[z] >= 0)
          throw SolverError("master selected two fleet sizes for one zone");
        d.fleet_choice[z] = static_cast<int>(n);
      }
  for (int c : d.fleet_choice)
    if (c < 0) throw SolverError("master left a zone without a fleet size");
  return d;
}

bool lexicographic_less(const DesignDecision& a, const DesignDecision& b) {
  if (a.frequency_choice != b.frequency_choice)
    return a.frequency_choice < b.frequency_choice;
  return a.fleet_choice < b.fleet_choice;
}

struct ActiveCut {
  OptimalityCut cut;
  std::uint64_t key = 0;
  int slack_streak = 0;
  // A cut that was parked once and then needed again stays for good;
  // letting it shuttle in and out can trap the master in a cycle of
  // revisited designs.
  bool pinned = false;
};

struct SolvedDesign {
  double objective = 0.0;
  std::vector<OptimalityCut> cuts;
};

// One driver behind both entry points; the classic variant is the enhanced
// machinery with every extra switched off.
BendersRun drive(const MultimodalNetwork& net, const DesignConfig& cfg,
                 const BendersConfig& bcfg, bool aggregated,
                 bool with_clique_cover, int pool_size, bool cleanup) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate(net);
  if (bcfg.max_iterations < 1) throw DataError("iteration budget must be >= 1");
  if (!(bcfg.epsilon >= 0.0)) throw DataError("negative epsilon");

  // The decomposition assumes every design admits a feasible assignment,
  // which the walking and road layers must guarantee on their own.
  std::vector<char> design_free(6, 1);
  design_free[static_cast<int>(LinkKind::Transit)] = 0;
  for (int k : net.destinations()) {
    const std::vector<char> mark = net.reaches(k, design_free);
    const std::vector<double> g = net.g_vector(k);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i] > 0.0 && !mark[i])
        throw DataError("origin " + net.nodes()[i].id +
                        " cannot reach destination " + net.nodes()[k].id +
                        " without transit, so closing all lines would "
                        "strand its demand");
  }

  int sentinel = -1;
  for (std::size_t n = 0; n < cfg.omega.size(); ++n)
    if (std::fabs(cfg.omega[n] - 0.01) < 1e-12) sentinel = static_cast<int>(n);
  DesignDecision initial;
  initial.frequency_choice.assign(net.lines().size(), -1);
  initial.fleet_choice.assign(net.zones().size(), sentinel);
  if (!within_budgets(net, initial, cfg))
    throw DataError("the minimum design already exceeds the budgets");

  const std::vector<std::vector<double>> wb = design_wait_bounds(net, cfg);
  const std::vector<CliqueCut> cliques =
      with_clique_cover ? make_clique_cuts(cfg, static_cast<int>(
                                                    net.zones().size()))
                        : std::vector<CliqueCut>{};
  const std::vector<CoverCut> covers =
      with_clique_cover ? make_cover_cuts(net, cfg) : std::vector<CoverCut>{};

  BendersRun run;
  std::vector<ActiveCut> active;
  std::unordered_map<std::uint64_t, OptimalityCut> parked;
  std::unordered_set<std::uint64_t> active_keys;
  std::unordered_map<std::uint64_t, SolvedDesign> solved;

  const auto activate = [&](const OptimalityCut& cut) -> int {
    const std::uint64_t key = cut.hash();
    if (active_keys.count(key)) return 0;
    const bool returning = parked.erase(key) > 0;
    active.push_back({cut, key, 0, returning});
    active_keys.insert(key);
    return 1;
  };

  // Evaluates a design once: subproblem, cuts, incumbent. Returns the
  // total passenger cost and the number of cuts newly activated.
  const auto evaluate = [&](const DesignDecision& d, int* added) {
    const std::uint64_t key = hash_decision(d);
    auto it = solved.find(key);
    if (it == solved.end()) {
      const SubproblemResult sp =
          solve_subproblem(net, cfg, wb, d, bcfg.parallel);
      ++run.subproblem_solves;
      run.lp_fallbacks += sp.lp_fallbacks;
      SolvedDesign entry;
      entry.objective = sp.assignment.objective;
      if (aggregated)
        entry.cuts.push_back(make_classic_cut(net, cfg, wb, sp));
      else
        entry.cuts = make_disaggregated_cuts(net, cfg, wb, sp);
      it = solved.emplace(key, std::move(entry)).first;
    }
    for (const OptimalityCut& cut : it->second.cuts) *added += activate(cut);
    const double objective = it->second.objective;
    if (objective < run.best_objective ||
        (objective == run.best_objective &&
         lexicographic_less(d, run.best_design))) {
      run.best_objective = objective;
      run.best_design = d;
    }
    return objective;
  };

  int added0 = 0;
  const double initial_objective = evaluate(initial, &added0);
  run.lower_bound = 0.0;
  run.trace.push_back({0, 0.0, initial_objective, run.best_objective,
                       run.best_objective > 0.0 ? 100.0 : 0.0, added0, 0,
                       static_cast<int>(active.size()),
                       seconds_since(start)});
  run.stop_reason = "iteration limit";

  for (long t = 1; t <= bcfg.max_iterations; ++t) {
    std::vector<OptimalityCut> cuts;
    cuts.reserve(active.size());
    for (const ActiveCut& ac : active) cuts.push_back(ac.cut);
    const MasterModel master =
        build_master(net, cfg, aggregated, cliques, covers, cuts);
    MilpOptions opt;
    opt.pool_size = std::max(1, pool_size);
    opt.pool_gap = bcfg.pool_gap;
    const MilpResult res = solve_milp(master.model, opt);
    if (res.status != SolveStatus::Optimal)
      throw SolverError(std::string("master problem ended ") +
                        to_string(res.status));
    run.lower_bound = std::max(run.lower_bound, res.objective);

    int added = 0;
    const std::size_t present = active.size();
    const DesignDecision incumbent_design =
        decode_master(master, res.pool.front());
    // The master re-proposing a design whose cuts it already contains means
    // no design can beat the incumbent: its objective there already equals
    // the subproblem value, so the bound has closed.
    const bool repick = solved.count(hash_decision(incumbent_design)) > 0;
    double iteration_upper = 0.0;
    std::unordered_set<std::uint64_t> seen_this_round;
    for (std::size_t s = 0; s < res.pool.size(); ++s) {
      const DesignDecision d =
          s == 0 ? incumbent_design : decode_master(master, res.pool[s]);
      if (!seen_this_round.insert(hash_decision(d)).second) continue;
      const double objective = evaluate(d, &added);
      if (s == 0) iteration_upper = objective;
    }
    if (repick && added == 0)
      run.lower_bound = std::max(run.lower_bound, run.best_objective);

    int removed = 0;
    if (cleanup) {
      for (std::size_t c = 0; c < present; ++c) {
        const OptimalityCut& cut = active[c].cut;
        const int eta =
            cut.destination < 0
                ? master.eta_col[0]
                : master.eta_col[std::find(net.destinations().begin(),
                                           net.destinations().end(),
                                           cut.destination) -
                                 net.destinations().begin()];
        const double rhs = cut.rhs_at(incumbent_design);
        if (res.pool.front()[eta] - rhs <= kTightTol * (1.0 + std::fabs(rhs)))
          active[c].slack_streak = 0;
        else
          ++active[c].slack_streak;
      }
      std::vector<ActiveCut> kept;
      kept.reserve(active.size());
      for (ActiveCut& ac : active) {
        if (ac.slack_streak >= bcfg.cleanup_patience && !ac.pinned) {
          parked.emplace(ac.key, std::move(ac.cut));
          active_keys.erase(ac.key);
          ++removed;
        } else {
          kept.push_back(std::move(ac));
        }
      }
      active = std::move(kept);
    }

    const double gap =
        run.best_objective > 0.0
            ? std::max(0.0, (run.best_objective - run.lower_bound) * 100.0 /
                                run.best_objective)
            : 0.0;
    run.trace.push_back({t, run.lower_bound, iteration_upper,
                         run.best_objective, gap, added, removed,
                         static_cast<int>(active.size()),
                         seconds_since(start)});
    if (run.best_objective - run.lower_bound <= bcfg.epsilon) {
      run.converged = true;
      run.stop_reason = "converged";
      break;
    }
    if (seconds_since(start) > bcfg.time_limit_seconds) {
      run.stop_reason = "time limit";
      break;
    }
  }
  run.gap_percent =
      run.best_objective > 0.0
          ? std::max(0.0, (run.best_objective - run.lower_bound) * 100.0 /
                              run.best_objective)
          : 0.0;
  return run;
}

}  // namespace

BendersRun run_classic(const MultimodalNetwork& net, const DesignConfig& cfg,
                       const BendersConfig& bcfg) {
  return drive(net, cfg, bcfg, /*aggregated=*/true,
               /*with_clique_cover=*/false, /*pool_size=*/1,
               /*cleanup=*/false);
}

BendersRun run_enhanced(const MultimodalNetwork& net, const DesignConfig& cfg,
                        const BendersConfig& bcfg) {
  return drive(net, cfg, bcfg, /*aggregated=*/!bcfg.disaggregated,
               bcfg.clique_cover, bcfg.pool_size, bcfg.cut_cleanup);
}

void write_trace_csv(const std::string& path, const BendersRun& run) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot write " + path);
  std::fputs(
      "iteration,lower_bound,upper_bound,gap_percent,cuts_added,seconds\n",
      f);
  for (const BendersIteration& it : run.trace)
    std::fprintf(f, "%ld,%.10g,%.10g,%.10g,%d,%.3f\n", it.iteration,
                 it.lower_bound, it.upper_bound, it.gap_percent,
                 it.cuts_added, it.seconds);
  std::fclose(f);
}

}  // namespace modt
