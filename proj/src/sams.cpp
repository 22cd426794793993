#include "freqfleet/sams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freqfleet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kInnerIters = 50;
constexpr double kInnerTolMin = 0.01;

// Step 2: costs, shortest paths, mode choice, loading, at the given waits.
struct AssignmentPass {
    std::vector<ModeSplit> splits;
    std::vector<double> transit_demand;
    std::vector<PathResult> paths;
    LinkFlows flows;
};

AssignmentPass run_assignment(const Scenario& sc, const MultimodalGraph& g,
                              const Solution& sol, const std::vector<double>& wait_min) {
    const std::size_t K = sc.periods.size();
    AssignmentPass pass;
    pass.splits.resize(sc.demand.size());
    pass.transit_demand.assign(sc.demand.size(), 0.0);
    pass.paths.resize(sc.demand.size());

    CostOverlay overlay;
    std::vector<ReverseCosts> by_dest(sc.zones.size());
    std::vector<char> have_dest(sc.zones.size(), 0);

    for (std::size_t k = 0; k < K; ++k) {
        update_costs(g, sc, sol.freq_per_h, wait_min[k], static_cast<int>(k), overlay);
        std::fill(have_dest.begin(), have_dest.end(), 0);
        for (std::size_t i = 0; i < sc.demand.size(); ++i) {
            const DemandEntry& e = sc.demand[i];
            if (e.period != static_cast<int>(k)) continue;
            if (!have_dest[e.destination]) {
                by_dest[e.destination] = reverse_costs(g, overlay, e.destination);
                have_dest[e.destination] = 1;
            }
            PathResult pr = extract_path(g, overlay, by_dest[e.destination], e.origin);
            double u_transit = pr.reachable
                                   ? transit_utility(pr.generalized_cost_min, e.transit_fare,
                                                     sc.choice)
                                   : -kInf;
            pass.splits[i] = mode_split(e.trips_per_h, u_transit, e.p2p_sams_utility,
                                        e.drive_utility);
            pass.transit_demand[i] = pass.splits[i].transit_trips_per_h;
            pass.paths[i] = std::move(pr);
        }
    }
    pass.flows = assign_flows(g, sc, pass.transit_demand, pass.paths);
    return pass;
}

// Step 4: solve w = wait_time(rho * exp(beta1*gw*(w - w_ref))) by damped
// iteration from w_start, with a monotone bracket as safeguard.
double inner_wait_fixed_point(double rho, double w_ref, double w_start,
                              const Scenario& sc) {
    const double slope = sc.choice.beta_time * sc.choice.wait_factor;  // < 0
    auto predicted = [&](double w) {
        return wait_time(rho * std::exp(slope * (w - w_ref)), sc.sams);
    };
    // g is nonincreasing in w, so g(w) - w has a unique root.
    double lo = sc.sams.min_wait_min;
    double hi = std::max(w_start, predicted(lo));
    double w = std::clamp(w_start, lo, hi);
    for (int it = 0; it < kInnerIters; ++it) {
        double target = predicted(w);
        if (std::abs(target - w) <= kInnerTolMin) return w;
        if (target > w) lo = std::max(lo, w); else hi = std::min(hi, w);
        double next = 0.5 * w + 0.5 * target;
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
        w = next;
    }
    return w;
}

}  // namespace

double wait_time(double utilization, const SamsParams& sp) {
    if (utilization <= sp.cutoff_lo) return sp.min_wait_min;
    if (utilization <= sp.cutoff_hi)
        return sp.min_wait_min + sp.slope_lo_min * (utilization - sp.cutoff_lo);
    return sp.min_wait_min + sp.slope_lo_min * (sp.cutoff_hi - sp.cutoff_lo) +
           sp.slope_hi_min * (utilization - sp.cutoff_hi);
}

double utilization(double feeder_time_pax_h, double fleet, double occupancy) {
    if (feeder_time_pax_h <= 0.0) return 0.0;
    if (fleet <= 0.0) return kInf;
    return feeder_time_pax_h / (occupancy * fleet);
}

FixedPointResult fixed_point(const Scenario& sc, const MultimodalGraph& g,
                             const Solution& sol, int max_outer_iters) {
    const std::size_t K = sc.periods.size();
    FixedPointResult res;
    res.wait_min.assign(K, sc.sams.min_wait_min);  // Step 1
    res.utilization.assign(K, 0.0);

    AssignmentPass pass;
    for (int outer = 1; outer <= max_outer_iters; ++outer) {
        res.iterations = outer;
        pass = run_assignment(sc, g, sol, res.wait_min);  // Step 2

        double max_change = 0.0;
        std::vector<double> next(K);
        for (std::size_t k = 0; k < K; ++k) {
            double rho = utilization(pass.flows.feeder_time_pax[k], sol.fleet[k],
                                     sc.sams.avg_occupancy);
            res.utilization[k] = rho;
            if (std::isinf(rho)) {
                // No fleet but feeder demand: route at the wait ceiling and
                // let the rejection model absorb the demand.
                next[k] = sc.sams.max_wait_min;
            } else {
                double calculated = wait_time(rho, sc.sams);                      // Step 3
                double approximated = inner_wait_fixed_point(rho, res.wait_min[k],
                                                             calculated, sc);     // Step 4
                next[k] = sc.sams.fp_step_approx * approximated +
                          sc.sams.fp_step_calc * calculated;                      // Step 5
            }
            max_change = std::max(max_change, std::abs(next[k] - res.wait_min[k]));
        }
        res.wait_min = std::move(next);
        if (max_change <= sc.sams.fp_tol_min) {  // Step 6
            res.converged = true;
            break;
        }
    }

    // Report the state evaluated at the returned waits.
    pass = run_assignment(sc, g, sol, res.wait_min);
    for (std::size_t k = 0; k < K; ++k)
        res.utilization[k] = utilization(pass.flows.feeder_time_pax[k], sol.fleet[k],
                                         sc.sams.avg_occupancy);
    res.splits = std::move(pass.splits);
    res.transit_demand = std::move(pass.transit_demand);
    res.paths = std::move(pass.paths);
    res.flows = std::move(pass.flows);
    return res;
}

std::vector<double> wait_recalc(const Scenario& sc, const MultimodalGraph& g,
                                const Solution& sol, const std::vector<double>& wait_min) {
    AssignmentPass pass = run_assignment(sc, g, sol, wait_min);
    std::vector<double> out(sc.periods.size());
    for (std::size_t k = 0; k < sc.periods.size(); ++k) {
        double rho = utilization(pass.flows.feeder_time_pax[k], sol.fleet[k],
                                 sc.sams.avg_occupancy);
        out[k] = std::isinf(rho) ? sc.sams.max_wait_min : wait_time(rho, sc.sams);
    }
    return out;
}

}  // namespace freqfleet
