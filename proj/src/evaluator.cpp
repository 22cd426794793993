#include "freqfleet/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "freqfleet/util.hpp"

namespace freqfleet {

namespace {
constexpr double kBudgetSlack = 1e-9;  // relative
}

double transit_rejection(double peak_flow_per_h, double capacity_per_veh,
                         double freq_per_h) {
    return std::max(0.0, peak_flow_per_h - capacity_per_veh * freq_per_h);
}

double sams_rejection(double rho, double feeder_flow_per_h) {
    if (feeder_flow_per_h <= 0.0) return 0.0;
    if (std::isinf(rho)) return feeder_flow_per_h;
    if (rho <= 0.0) return 0.0;
    return std::max(0.0, (1.0 - 1.0 / rho) * feeder_flow_per_h);
}

double operating_cost(const Solution& sol, const Scenario& sc) {
    double total = 0.0;
    for (std::size_t k = 0; k < sc.periods.size(); ++k) {
        double transit = 0.0;
        for (std::size_t p = 0; p < sc.patterns.size(); ++p)
            transit += sc.modes[sc.patterns[p].mode].unit_op_cost *
                       sc.patterns[p].cycle_time_h * sol.freq_per_h[p][k];
        total += sc.periods[k].duration_h * (transit + sc.sams.unit_op_cost * sol.fleet[k]);
    }
    return total;
}

Solution repair(Solution sol, const Scenario& sc) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    const double budget = sc.budget.daily_budget;

    for (std::size_t k = 0; k < K; ++k)
        sol.fleet[k] = std::clamp(sol.fleet[k], 0.0, sc.sams.max_fleet);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k)
            sol.freq_per_h[p][k] =
                std::clamp(sol.freq_per_h[p][k], 0.0, sc.patterns[p].max_frequency);

    double sav_cost = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        sav_cost += sc.periods[k].duration_h * sc.sams.unit_op_cost * sol.fleet[k];

    if (sav_cost > budget) {
        double factor = budget / sav_cost;
        for (std::size_t k = 0; k < K; ++k) sol.fleet[k] *= factor;
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t k = 0; k < K; ++k) sol.freq_per_h[p][k] = 0.0;
        return sol;
    }

    double transit_cost = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t p = 0; p < P; ++p)
            transit_cost += sc.periods[k].duration_h *
                            sc.modes[sc.patterns[p].mode].unit_op_cost *
                            sc.patterns[p].cycle_time_h * sol.freq_per_h[p][k];
    double remaining = budget - sav_cost;
    if (transit_cost > remaining) {
        double factor = transit_cost > 0.0 ? remaining / transit_cost : 0.0;
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t k = 0; k < K; ++k) {
                sol.freq_per_h[p][k] =
                    std::clamp(sol.freq_per_h[p][k] * factor, 0.0,
                               sc.patterns[p].max_frequency);
            }
    }
    return sol;
}

EvalResult evaluate(const Solution& sol, const Scenario& sc, const MultimodalGraph& g) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();

    EvalResult res;
    res.solution = sol;

    FixedPointResult fp = fixed_point(sc, g, sol);
    res.fp_converged = fp.converged;
    res.fp_iterations = fp.iterations;
    res.wait_min = fp.wait_min;
    res.utilization = fp.utilization;
    res.transit_demand = std::move(fp.transit_demand);
    res.path_meta = std::move(fp.paths);
    res.flows = std::move(fp.flows);

    res.transit_rejection_per_h.assign(P, std::vector<double>(K, 0.0));
    res.sams_rejection_per_h.assign(P, std::vector<double>(K, 0.0));
    res.served_per_h.assign(K, 0.0);
    res.demand_per_h.assign(K, 0.0);

    std::vector<double> transit_per_period(K, 0.0);
    for (std::size_t i = 0; i < sc.demand.size(); ++i) {
        transit_per_period[sc.demand[i].period] += res.transit_demand[i];
        res.demand_per_h[sc.demand[i].period] += sc.demand[i].trips_per_h;
    }

    res.objective = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double rejected = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            double r_tau = transit_rejection(res.flows.pattern_peak[p][k],
                                             sc.modes[sc.patterns[p].mode].vehicle_capacity,
                                             sol.freq_per_h[p][k]);
            double r_chi = sams_rejection(res.utilization[k],
                                          res.flows.pattern_feeder_flow[p][k]);
            res.transit_rejection_per_h[p][k] = r_tau;
            res.sams_rejection_per_h[p][k] = r_chi;
            rejected += std::max(r_tau, r_chi);
        }
        res.served_per_h[k] = transit_per_period[k] - rejected;
        res.objective += sc.periods[k].duration_h * res.served_per_h[k];
    }

    res.cost = operating_cost(sol, sc);
    res.feasible = res.cost <= sc.budget.daily_budget * (1.0 + kBudgetSlack);
    return res;
}

std::pair<Solution, EvalResult> brute_force(const Scenario& sc, const MultimodalGraph& g,
                                            const std::vector<double>& freq_grid,
                                            const std::vector<double>& fleet_grid,
                                            const GridCallback& on_eval) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    if (freq_grid.empty() || fleet_grid.empty())
        throw std::invalid_argument("brute_force needs non-empty grids");

    double combos = std::pow(static_cast<double>(freq_grid.size()),
                             static_cast<double>(P * K)) *
                    std::pow(static_cast<double>(fleet_grid.size()),
                             static_cast<double>(K));
    if (!(combos <= 1e7))
        throw GridTooLargeError("grid would enumerate " + format_double(combos) +
                                " combinations (limit 1e7)");

    std::vector<std::size_t> fidx(P * K, 0), sidx(K, 0);
    auto advance = [](std::vector<std::size_t>& digits, std::size_t base) {
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < base) return true;
            digits[i] = 0;
        }
        return false;
    };

    bool have_best = false;
    Solution best_sol;
    EvalResult best_eval;
    auto lex_less = [](const Solution& a, const Solution& b) {
        if (a.freq_per_h != b.freq_per_h) return a.freq_per_h < b.freq_per_h;
        return a.fleet < b.fleet;
    };

    while (true) {
        Solution sol;
        sol.freq_per_h.assign(P, std::vector<double>(K, 0.0));
        sol.fleet.assign(K, 0.0);
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t k = 0; k < K; ++k)
                sol.freq_per_h[p][k] = freq_grid[fidx[p * K + k]];
        for (std::size_t k = 0; k < K; ++k) sol.fleet[k] = fleet_grid[sidx[k]];

        Solution repaired = repair(sol, sc);
        EvalResult ev = evaluate(repaired, sc, g);
        if (on_eval) on_eval(sol, ev);

        bool take = !have_best;
        if (have_best) {
            if (ev.objective > best_eval.objective) take = true;
            else if (ev.objective == best_eval.objective) {
                if (ev.cost < best_eval.cost) take = true;
                else if (ev.cost == best_eval.cost &&
                         lex_less(repaired, best_sol)) take = true;
            }
        }
        if (take) {
            have_best = true;
            best_sol = repaired;
            best_eval = std::move(ev);
        }

        if (!advance(sidx, fleet_grid.size())) {
            if (!advance(fidx, freq_grid.size())) break;
        }
    }
    return {best_sol, best_eval};
}

void write_eval_csv(const EvalResult& res, const Scenario& sc, const std::string& out_dir) {
    {
        std::ofstream out(out_dir + "/served.csv");
        out << "period,demand,served,rejected\n";
        for (std::size_t k = 0; k < sc.periods.size(); ++k) {
            double transit = 0.0;
            for (std::size_t i = 0; i < sc.demand.size(); ++i)
                if (sc.demand[i].period == static_cast<int>(k)) transit += res.transit_demand[i];
            out << k << "," << format_double(res.demand_per_h[k]) << ","
                << format_double(res.served_per_h[k]) << ","
                << format_double(transit - res.served_per_h[k]) << "\n";
        }
    }
    {
        std::ofstream out(out_dir + "/patterns.csv");
        out << "p,k,f,peak,r_tau,r_chi\n";
        for (std::size_t p = 0; p < sc.patterns.size(); ++p)
            for (std::size_t k = 0; k < sc.periods.size(); ++k)
                out << p << "," << k << "," << format_double(res.solution.freq_per_h[p][k])
                    << "," << format_double(res.flows.pattern_peak[p][k]) << ","
                    << format_double(res.transit_rejection_per_h[p][k]) << ","
                    << format_double(res.sams_rejection_per_h[p][k]) << "\n";
    }
    {
        std::ofstream out(out_dir + "/sams.csv");
        out << "k,s,rho,wait\n";
        for (std::size_t k = 0; k < sc.periods.size(); ++k)
            out << k << "," << format_double(res.solution.fleet[k]) << ","
                << format_double(res.utilization[k]) << ","
                << format_double(res.wait_min[k]) << "\n";
    }
}

}  // namespace freqfleet
