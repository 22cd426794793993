#include "freqfleet/choice.hpp"

#include <algorithm>
#include <cmath>

namespace freqfleet {

double transit_utility(double journey_time_min, double fare, const ChoiceParams& cp) {
    return cp.asc_transit + cp.beta_time * journey_time_min + cp.beta_fare * fare;
}

ModeSplit mode_split(double total_trips_per_h, double u_transit, double u_p2p,
                     double u_drive) {
    ModeSplit ms;
    if (total_trips_per_h <= 0.0) return ms;
    double m = std::max({u_transit, u_p2p, u_drive});
    double et = std::isinf(u_transit) && u_transit < 0 ? 0.0 : std::exp(u_transit - m);
    double ep = std::exp(u_p2p - m);
    double ed = std::exp(u_drive - m);
    double denom = et + ep + ed;
    ms.transit_trips_per_h = total_trips_per_h * et / denom;
    ms.p2p_trips_per_h = total_trips_per_h * ep / denom;
    ms.drive_trips_per_h = total_trips_per_h * ed / denom;
    return ms;
}

}  // namespace freqfleet
