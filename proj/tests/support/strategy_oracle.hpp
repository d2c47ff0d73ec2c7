#pragma once

// Brute-force reference for the per-destination assignment: enumerate every
// way of fixing a choice at every node (one no-wait link, or a nonempty
// subset of the links with boarding rates), evaluate the expected cost of
// each combination by recursion, and keep the cheapest demand-weighted
// total.  Combinations whose choices loop are scored as unusable, so the
// oracle is exact only on fixtures whose usable links form an acyclic graph.

#include <functional>
#include <vector>

#include "modt/assignment.hpp"
#include "modt/common.hpp"
#include "modt/network.hpp"

namespace modt::testing {

inline double enumerate_strategies(const MultimodalNetwork& net,
                                   const ServiceDesign& design,
                                   const AssignmentParams& params,
                                   int destination) {
  const int n = static_cast<int>(net.nodes().size());
  const std::vector<double> rates = link_rates(net, design, params);
  const std::vector<double> costs = net.costs(params.value_of_time);
  const std::vector<double> g = net.g_vector(destination);

  struct Option {
    int walk = -1;           // a single no-wait link, or
    std::vector<int> race;   // a nonempty set of rate-limited links
  };
  std::vector<std::vector<Option>> options(n);
  double combinations = 1.0;
  for (int i = 0; i < n; ++i) {
    if (i == destination) continue;
    std::vector<int> walkers, racers;
    for (int a : net.fs(i)) {
      if (rates[a] == kInf)
        walkers.push_back(a);
      else if (rates[a] > 0.0)
        racers.push_back(a);
    }
    for (int a : walkers) options[i].push_back({a, {}});
    for (unsigned mask = 1; mask < (1u << racers.size()); ++mask) {
      Option opt;
      for (std::size_t b = 0; b < racers.size(); ++b)
        if (mask & (1u << b)) opt.race.push_back(racers[b]);
      options[i].push_back(opt);
    }
    if (!options[i].empty()) combinations *= options[i].size();
    if (combinations > 2e6)
      throw DataError("fixture too large for strategy enumeration");
  }

  std::vector<int> pick(n, 0);
  std::vector<int> state(n);
  std::vector<double> value(n);
  std::function<double(int)> eval = [&](int i) -> double {
    if (i == destination) return 0.0;
    if (state[i] == 2) return value[i];
    if (state[i] == 1 || options[i].empty()) return kInf;
    state[i] = 1;
    const Option& opt = options[i][pick[i]];
    double v;
    if (opt.walk >= 0) {
      v = costs[opt.walk] + eval(net.links()[opt.walk].to);
    } else {
      double numer = 1.0, total_rate = 0.0;
      for (int a : opt.race) {
        numer += rates[a] * (costs[a] + eval(net.links()[a].to));
        total_rate += rates[a];
      }
      v = numer / total_rate;
    }
    state[i] = 2;
    value[i] = v;
    return v;
  };

  std::vector<int> axes;
  for (int i = 0; i < n; ++i)
    if (!options[i].empty()) axes.push_back(i);

  double best = kInf;
  while (true) {
    std::fill(state.begin(), state.end(), 0);
    double total = 0.0;
    for (int i = 0; i < n && total < kInf; ++i)
      if (g[i] > 0.0) total += g[i] * eval(i);
    best = std::min(best, total);
    std::size_t t = 0;
    for (; t < axes.size(); ++t) {
      if (++pick[axes[t]] < static_cast<int>(options[axes[t]].size())) break;
      pick[axes[t]] = 0;
    }
    if (t == axes.size()) break;
  }
  return best;
}

}  // namespace modt::testing
