#include "modt/waittime.hpp"

#include "modt/common.hpp"

namespace modt {

double mod_rate_per_minute(const ModZoneParams& p) {
  return p.matching_rate * p.vehicles;
}

double mod_wait_minutes(const ModZoneParams& p) {
  const double rate = mod_rate_per_minute(p);
  if (rate <= 0.0)
    throw DataError("on-demand wait undefined: matching rate times vehicles "
                    "must be positive");
  return 1.0 / rate;
}

LineChoice line_choice_probabilities(const std::vector<double>& rates) {
  double total = 0.0;
  for (double f : rates) {
    if (f < 0.0) throw DataError("line rates must be nonnegative");
    total += f;
  }
  if (rates.empty() || total <= 0.0)
    throw DataError("attractive set must carry a positive combined rate");
  LineChoice out;
  out.probability.reserve(rates.size());
  out.conditional_wait.reserve(rates.size());
  for (double f : rates) {
    out.probability.push_back(f / total);
    out.conditional_wait.push_back(f / (total * total));
  }
  out.expected_wait = 1.0 / total;
  return out;
}

ModeChoice mode_choice_probabilities(double transit_rate, double mod_rate) {
  if (transit_rate < 0.0 || mod_rate < 0.0)
    throw DataError("rates must be nonnegative");
  const double total = transit_rate + mod_rate;
  if (total <= 0.0)
    throw DataError("combined transit and on-demand rate must be positive");
  return {mod_rate / total, transit_rate / total, 1.0 / total};
}

}  // namespace modt
