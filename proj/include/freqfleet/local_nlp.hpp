#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "freqfleet/evaluator.hpp"
#include "freqfleet/scenario.hpp"

namespace freqfleet {

// Frozen snapshot of one full evaluation; the local sub-problem is built
// around it and never touches the graph again.
struct ReferenceState {
    std::vector<std::vector<double>> ref_freq;     // [pattern][period], floored at kMinActiveFrequency
    std::vector<double> ref_wait_min;              // per period
    std::vector<double> ref_fleet;                 // per period
    std::vector<std::vector<double>> peak_demand;  // [pattern][period]

    std::vector<double> od_transit_demand;  // per demand entry
    std::vector<int> feeder_count;          // per demand entry, 0..2
    std::vector<double> feeder_time_min;    // per demand entry
    std::vector<std::vector<std::vector<int>>> pattern_od;  // [pattern][period] -> entry indices

    // Aggregates by (pattern, period, feeder-link count).
    std::vector<std::vector<std::array<double, 3>>> agg_demand;        // sum of od demand
    std::vector<std::vector<std::array<double, 3>>> agg_feeder_pax_h;  // sum of demand * ride hours
};

ReferenceState extract_reference(const EvalResult& res, const Scenario& sc);

// Free variables of the sub-problem: frequencies, fleets and the per-period
// wait the demand model is allowed to assume.
struct SubSolution {
    std::vector<std::vector<double>> freq;  // [pattern][period]
    std::vector<double> fleet;              // per period
    std::vector<double> wait_min;           // per period
};

// Demand response to a headway change relative to the reference frequency,
// hard-clipped to [elasticity_lo, elasticity_hi].
double elasticity_transit(double freq, double ref_freq, const Scenario& sc);

// Demand response to a feeder-wait change, per feeder leg count i in {0,1,2}.
double elasticity_feeder(double wait_min, double ref_wait_min, int i,
                         const Scenario& sc);

struct SubObjective {
    double value = 0.0;
    // Layout: f[p*K+k] for all patterns, then s[k], then u[k].
    std::vector<double> gradient;
};

// Smoothed pattern-level served demand minus rejections and regularizers.
// Every max is a log-sum-exp / softplus at sams.softmax_sharpness, and the
// elasticity clipping is a smooth clamp, so the gradient is exact.
SubObjective sub_objective(const SubSolution& x, const ReferenceState& ref,
                           const Scenario& sc);

// Box bounds of the sub-problem around the reference.
struct SubBoxes {
    std::vector<double> lo, hi;  // flat layout as in SubObjective::gradient
};
SubBoxes sub_boxes(const ReferenceState& ref, const Scenario& sc);

// Projected gradient ascent with backtracking line search and an escalating
// quadratic budget penalty, multi-started from Gaussian relative
// perturbations of `start`. Returns the best feasible finisher as a full
// Solution, passed through repair.
Solution solve_local(const ReferenceState& ref, const Scenario& sc,
                     const SubSolution& start, std::uint64_t seed);

}  // namespace freqfleet
