#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "freqfleet/evaluator.hpp"
#include "freqfleet/scenario.hpp"

namespace freqfleet {

// Flat encoding of a Solution: f[p*K+k] for all patterns, then s[k].
std::vector<double> encode_solution(const Solution& sol);
Solution decode_solution(const std::vector<double>& x, const Scenario& sc);

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double best_objective = 0.0;
    bool has_best = false;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<std::mt19937_64> streams;  // one per particle
    std::vector<double> best_position;
    double best_objective = 0.0;
    bool has_best = false;
    int epoch = 0;
};

// Particle 0 starts at the baseline (or mid-box); the rest are uniform in
// the boxes. All positions repaired, velocities zero. Deterministic per
// (scenario, seed) via per-particle substreams.
Swarm init_swarm(const Scenario& sc, std::uint64_t seed);

// One PSO move: update personal/global bests from `fitness`, then
// inertia + cognitive + social velocity update, clamp, move, clip, repair.
void step(Swarm& sw, const Scenario& sc, const std::vector<double>& fitness);

struct HistoryRecord {
    int epoch = 0;
    int particle = 0;
    double objective = 0.0;           // evaluation of the epoch's position
    double post_nlp_objective = 0.0;  // after the improvement loop (== objective when skipped)
    double cost = 0.0;
};

struct EpochSummary {
    int epoch = 0;
    double best_objective = 0.0;  // global best so far
    double mean_objective = 0.0;  // mean post-improvement objective this epoch
};

struct RunHistory {
    std::vector<HistoryRecord> records;
    std::vector<EpochSummary> epochs;
};

struct RunOptions {
    bool pso_only = false;
    int threads = 1;
    std::optional<std::uint64_t> seed = std::nullopt;  // overrides scenario seed
};

struct RunResult {
    Solution best;
    EvalResult best_eval;
    RunHistory history;
};

// The hybrid loop: per epoch, evaluate every particle, optionally refine it
// with the local sub-problem until the objective change drops below
// nlp.obj_tol (or max_inner_iters passes), then take a PSO step. Thread
// count never affects results.
RunResult run_hybrid(const Scenario& sc, const RunOptions& opts = {});

void write_history_csv(const RunHistory& h, const std::string& path);

}  // namespace freqfleet
