#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqfleet {

// A service time slice of the day (peak, off-peak, ...).
struct TimePeriod {
    int id = 0;
    double duration_h = 0.0;
};

// Vehicle technology operated on patterns (rail, bus, ...).
struct TransitMode {
    int id = 0;
    double vehicle_capacity = 0.0;  // passengers per vehicle
    double unit_op_cost = 0.0;      // currency per vehicle-hour
};

// A fixed route variant whose service frequency is a decision variable.
struct Pattern {
    int id = 0;
    int mode = 0;
    double cycle_time_h = 0.0;
    double max_frequency = 0.0;  // vehicles/h policy cap
    std::vector<int> stop_sequence;
    std::vector<double> segment_times_min;  // one per consecutive stop pair
};

struct WalkAccess {
    int stop = 0;
    double walk_time_min = 0.0;
};

struct FeederAccess {
    int stop = 0;
    double ride_time_min = 0.0;  // SAV feeder in-vehicle time
};

struct Zone {
    int id = 0;
    std::vector<WalkAccess> walk_access;
    std::vector<FeederAccess> feeder_access;

    bool unconnected() const { return walk_access.empty() && feeder_access.empty(); }
};

// One origin-destination demand record for one period. The point-to-point
// SAMS and driving utilities are exogenous inputs.
struct DemandEntry {
    int origin = 0;
    int destination = 0;
    int period = 0;
    double trips_per_h = 0.0;
    double transit_fare = 0.0;
    double p2p_sams_utility = 0.0;
    double drive_utility = 0.0;
};

struct ChoiceParams {
    double asc_transit = -1.5;         // transit mode constant
    double beta_time = -0.12;          // per minute
    double beta_fare = -0.5;           // per currency unit
    double wait_factor = 1.5;          // weight on waiting minutes
    double walk_factor = 2.0;          // weight on walking minutes
    double transfer_penalty_min = 5.0; // added per transfer
};

struct SamsParams {
    double min_wait_min = 3.0;     // wait floor W
    double cutoff_lo = 0.5;        // utilization breakpoint A1
    double cutoff_hi = 0.8;        // utilization breakpoint A2
    double slope_lo_min = 20.0;    // wait slope between A1 and A2
    double slope_hi_min = 50.0;    // wait slope above A2
    double avg_occupancy = 1.5;    // persons per feeder vehicle
    double unit_op_cost = 30.0;    // currency per vehicle-hour
    double max_fleet = 10000.0;    // per-period fleet cap
    double fp_step_approx = 0.8;   // blend weight on the elasticity-predicted wait
    double fp_step_calc = 0.2;     // blend weight on the recalculated wait
    double fp_tol_min = 3.0;       // outer fixed-point convergence tolerance
    double max_wait_min = 60.0;    // wait used when the fleet cannot serve demand
};

struct BudgetParams {
    double daily_budget = 1e7;
};

struct PsoParams {
    int epochs = 30;
    int particles = 40;
    double inertia = 0.9;
    double cognitive = 2.0;
    double social = 2.0;
    double velocity_clamp_frac = 0.25;  // of each coordinate's box width
    std::uint64_t seed = 1;
};

struct NlpParams {
    double reg = 0.001;            // L2 pull toward the reference point
    double freq_expand = 2.0;      // local frequency box half-width multiplier
    double wait_shrink = 0.5;      // local wait lower-bound multiplier
    double elasticity_lo = 0.0;
    double elasticity_hi = 3.0;
    double obj_tol = 0.1;          // objective change threshold for the improvement loop
    int max_inner_iters = 5;       // improvement passes per particle per epoch
    int multistart_count = 4;
    double perturb_sigma_frac = 0.2;
    double softmax_sharpness = 10.0;
};

struct SolverParams {
    PsoParams pso;
    NlpParams nlp;
};

// Decision vector: one frequency per (pattern, period) and one fleet size
// per period.
struct Solution {
    std::vector<std::vector<double>> freq_per_h;  // [pattern][period]
    std::vector<double> fleet;                    // [period]
};

struct Scenario {
    std::vector<TimePeriod> periods;
    std::vector<TransitMode> modes;
    std::vector<Pattern> patterns;
    std::vector<Zone> zones;
    std::vector<DemandEntry> demand;
    ChoiceParams choice;
    SamsParams sams;
    BudgetParams budget;
    SolverParams solver;
    std::optional<Solution> baseline;

    std::size_t num_periods() const { return periods.size(); }
    std::size_t num_patterns() const { return patterns.size(); }
    std::size_t num_zones() const { return zones.size(); }
};

struct Violation {
    std::string code;     // machine-readable, e.g. "FreqBoundNonpositive"
    std::string path;     // field path, e.g. "patterns[2].max_frequency"
    std::string message;
};

// Malformed document: bad JSON, wrong types, unknown keys.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally well-formed but violating a data invariant.
class ValidationError : public ScenarioError {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Loads, fills defaults, validates. `overrides` are dotted-key assignments
// ("solver.pso.epochs=2") applied to the parsed document before validation;
// only choice.*, sams.* and solver.* keys may be overridden.
Scenario load_scenario(const std::string& path,
                       const std::vector<std::string>& overrides = {});
Scenario parse_scenario_text(const std::string& text,
                             const std::vector<std::string>& overrides = {});

void save_scenario(const Scenario& sc, const std::string& path);
std::string scenario_to_json_text(const Scenario& sc);

std::vector<Violation> validate(const Scenario& sc);

// Solution documents share the scenario `baseline` schema.
Solution load_solution(const std::string& path);
Solution parse_solution_text(const std::string& text);
void save_solution(const Solution& sol, const std::string& path);
std::string solution_to_json_text(const Solution& sol);

}  // namespace freqfleet
