#pragma once

#include "freqfleet/scenario.hpp"

namespace freqfleet {

struct ModeSplit {
    double transit_trips_per_h = 0.0;
    double p2p_trips_per_h = 0.0;
    double drive_trips_per_h = 0.0;
};

// u = asc + beta_time * journey_time + beta_fare * fare
double transit_utility(double journey_time_min, double fare,
                       const ChoiceParams& cp);

// Multinomial logit split of total demand across transit, point-to-point
// SAMS and driving. u_transit may be -inf (unreachable transit); shares are
// computed max-shifted for numerical stability and sum to the total exactly.
ModeSplit mode_split(double total_trips_per_h, double u_transit, double u_p2p,
                     double u_drive);

}  // namespace freqfleet
