#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "freqfleet/graph.hpp"
#include "freqfleet/sams.hpp"
#include "freqfleet/scenario.hpp"

namespace freqfleet {

struct EvalResult {
    Solution solution;                 // the evaluated decision vector
    double objective = 0.0;            // served persons per day (duration-weighted)
    std::vector<double> served_per_h;  // per period
    std::vector<double> demand_per_h;  // per period, total OD demand
    std::vector<double> transit_demand;                        // per demand entry
    std::vector<std::vector<double>> transit_rejection_per_h;  // [pattern][period]
    std::vector<std::vector<double>> sams_rejection_per_h;     // [pattern][period]
    std::vector<double> wait_min;      // per period
    std::vector<double> utilization;   // per period
    LinkFlows flows;
    std::vector<PathResult> path_meta;  // per demand entry
    double cost = 0.0;                  // currency per day
    bool feasible = false;              // cost within the daily budget
    bool fp_converged = false;
    int fp_iterations = 0;
};

// Demand exceeding line capacity at the pattern's peak link.
double transit_rejection(double peak_flow_per_h, double capacity_per_veh,
                         double freq_per_h);

// Feeder demand share that the fleet cannot carry; rho may be +inf.
double sams_rejection(double rho, double feeder_flow_per_h);

double operating_cost(const Solution& sol, const Scenario& sc);

// Scales the solution onto the budget: fleet first (zeroing frequencies if
// the fleet alone exhausts the budget), then a uniform frequency factor.
// Idempotent; the result always satisfies the boxes and the budget.
Solution repair(Solution sol, const Scenario& sc);

EvalResult evaluate(const Solution& sol, const Scenario& sc,
                    const MultimodalGraph& g);

class GridTooLargeError : public std::runtime_error {
public:
    explicit GridTooLargeError(const std::string& what)
        : std::runtime_error(what) {}
};

// Exhaustive grid search oracle: every (pattern, period) frequency drawn
// from freq_grid, every period fleet from fleet_grid, repaired then
// evaluated. Ties resolved by lower cost, then lexicographic solution.
// Throws GridTooLargeError above 1e7 combinations. `on_eval`, when set,
// sees every (raw grid point, evaluation of its repaired form).
using GridCallback = std::function<void(const Solution& raw, const EvalResult& ev)>;
std::pair<Solution, EvalResult> brute_force(const Scenario& sc,
                                            const MultimodalGraph& g,
                                            const std::vector<double>& freq_grid,
                                            const std::vector<double>& fleet_grid,
                                            const GridCallback& on_eval = {});

// served.csv, patterns.csv, sams.csv under out_dir.
void write_eval_csv(const EvalResult& res, const Scenario& sc,
                    const std::string& out_dir);

}  // namespace freqfleet
