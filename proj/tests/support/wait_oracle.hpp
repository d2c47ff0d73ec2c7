#pragma once

#include <limits>
#include <random>
#include <vector>

namespace modt::testing {

struct RaceStats {
  std::vector<double> win_share;  // fraction of draws each option won
  double mean_wait = 0.0;         // mean minimum arrival time
};

// Simulates the arrival race behind the closed-form boarding split: draws
// independent exponential arrival times per option and tracks which option
// comes first and how long the wait was.  Options with zero rate never win.
inline RaceStats simulate_race(const std::vector<double>& rates_per_min,
                               int draws, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  RaceStats st;
  st.win_share.assign(rates_per_min.size(), 0.0);
  std::vector<std::exponential_distribution<double>> arrival;
  arrival.reserve(rates_per_min.size());
  for (double f : rates_per_min)
    arrival.emplace_back(f > 0.0 ? f : 1.0);
  double total_wait = 0.0;
  for (int d = 0; d < draws; ++d) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t winner = 0;
    for (std::size_t i = 0; i < arrival.size(); ++i) {
      if (rates_per_min[i] <= 0.0) continue;
      const double w = arrival[i](rng);
      if (w < best) {
        best = w;
        winner = i;
      }
    }
    st.win_share[winner] += 1.0;
    total_wait += best;
  }
  for (double& w : st.win_share) w /= draws;
  st.mean_wait = total_wait / draws;
  return st;
}

}  // namespace modt::testing
