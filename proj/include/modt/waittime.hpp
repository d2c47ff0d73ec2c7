#pragma once

#include <vector>

namespace modt {

// On-demand service parameters of one zone.  The pickup process behaves like
// an exponential server whose rate is the matching coefficient times the
// number of vehicles kept vacant in the zone.
struct ModZoneParams {
  double matching_rate = 0.0;  // per vehicle-minute
  double vehicles = 0.0;       // fractional allowed; 0.01 is the no-service floor
};

double mod_rate_per_minute(const ModZoneParams& p);
double mod_wait_minutes(const ModZoneParams& p);  // 1 / (rate)

// Boarding behavior at a stop served by competing exponential lines: the
// passenger takes whichever arrives first.
struct LineChoice {
  std::vector<double> probability;       // P_i = f_i / F
  std::vector<double> conditional_wait;  // E[wait | boarded line i] = f_i / F^2
  double expected_wait = 0.0;            // 1 / F
};

LineChoice line_choice_probabilities(const std::vector<double>& rates_per_min);

// Same race with an on-demand option added to the attractive set.
struct ModeChoice {
  double p_mod = 0.0;
  double p_transit = 0.0;
  double expected_wait = 0.0;  // 1 / (transit rate + mod rate)
};

ModeChoice mode_choice_probabilities(double transit_rate_per_min,
                                     double mod_rate_per_min);

}  // namespace modt
