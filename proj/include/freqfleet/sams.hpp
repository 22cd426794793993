#pragma once

#include <vector>

#include "freqfleet/choice.hpp"
#include "freqfleet/graph.hpp"
#include "freqfleet/scenario.hpp"

namespace freqfleet {

// Piecewise-linear feeder wait as a function of fleet utilization: flat at
// the floor up to cutoff_lo, then two increasing linear pieces.
double wait_time(double utilization, const SamsParams& sp);

// rho = feeder passenger-hours per vehicle-hour of capacity. Returns +inf
// when the fleet is zero but feeder demand is positive; downstream treats
// that as full rejection.
double utilization(double feeder_time_pax_h, double fleet, double occupancy);

struct FixedPointResult {
    std::vector<double> wait_min;     // per period
    std::vector<double> utilization;  // per period, may be +inf
    int iterations = 0;
    bool converged = false;
    std::vector<ModeSplit> splits;        // per demand entry
    std::vector<double> transit_demand;   // per demand entry
    std::vector<PathResult> paths;        // per demand entry
    LinkFlows flows;
};

// Couples feeder wait, mode choice and assignment until the per-period waits
// settle within sams.fp_tol_min. Non-convergence within max_outer_iters is
// flagged, not thrown. The returned splits/flows/utilization are evaluated
// at the returned waits.
FixedPointResult fixed_point(const Scenario& sc, const MultimodalGraph& g,
                             const Solution& sol, int max_outer_iters = 25);

// One assignment + wait recalculation pass at fixed waits; returns the
// recalculated waits. Used to probe self-consistency of a fixed point.
std::vector<double> wait_recalc(const Scenario& sc, const MultimodalGraph& g,
                                const Solution& sol,
                                const std::vector<double>& wait_min);

}  // namespace freqfleet
