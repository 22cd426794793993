#include "freqfleet/pso.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "freqfleet/local_nlp.hpp"
#include "freqfleet/util.hpp"

namespace freqfleet {

namespace {

constexpr std::uint64_t kTagParticle = 0x70617274;  // substream tags
constexpr std::uint64_t kTagNlp = 0x6e6c7030;

struct Boxes {
    std::vector<double> lo, hi;
};

Boxes solution_boxes(const Scenario& sc) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    Boxes b;
    b.lo.assign(P * K + K, 0.0);
    b.hi.assign(P * K + K, 0.0);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k) b.hi[p * K + k] = sc.patterns[p].max_frequency;
    for (std::size_t k = 0; k < K; ++k) b.hi[P * K + k] = sc.sams.max_fleet;
    return b;
}

void check_in_boxes(const std::vector<double>& x, const Boxes& b) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < b.lo[i] - 1e-9 || x[i] > b.hi[i] + 1e-9)
            throw std::logic_error("particle position escaped its box");
}

// Runs fn(i) for i in [0, n) on `threads` workers; results must be written
// to per-index slots so scheduling cannot affect the outcome.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    int nw = std::min(threads, n);
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<double> encode_solution(const Solution& sol) {
    std::vector<double> x;
    for (const auto& row : sol.freq_per_h) x.insert(x.end(), row.begin(), row.end());
    x.insert(x.end(), sol.fleet.begin(), sol.fleet.end());
    return x;
}

Solution decode_solution(const std::vector<double>& x, const Scenario& sc) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    if (x.size() != P * K + K) throw std::invalid_argument("solution vector size mismatch");
    Solution sol;
    sol.freq_per_h.assign(P, std::vector<double>(K, 0.0));
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k) sol.freq_per_h[p][k] = x[p * K + k];
    sol.fleet.assign(x.begin() + P * K, x.end());
    return sol;
}

Swarm init_swarm(const Scenario& sc, std::uint64_t seed) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    const int n = sc.solver.pso.particles;
    Boxes boxes = solution_boxes(sc);

    Swarm sw;
    sw.particles.resize(n);
    sw.streams.reserve(n);
    for (int i = 0; i < n; ++i)
        sw.streams.emplace_back(derive_seed(seed, kTagParticle, static_cast<std::uint64_t>(i)));

    for (int i = 0; i < n; ++i) {
        Particle& pt = sw.particles[i];
        std::vector<double> x(P * K + K, 0.0);
        if (i == 0) {
            if (sc.baseline) {
                x = encode_solution(*sc.baseline);
            } else {
                for (std::size_t j = 0; j < x.size(); ++j)
                    x[j] = 0.5 * (boxes.lo[j] + boxes.hi[j]);
            }
        } else {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] = boxes.lo[j] + u01(sw.streams[i]) * (boxes.hi[j] - boxes.lo[j]);
        }
        pt.position = encode_solution(repair(decode_solution(x, sc), sc));
        pt.velocity.assign(x.size(), 0.0);
    }
    return sw;
}

void step(Swarm& sw, const Scenario& sc, const std::vector<double>& fitness) {
    if (fitness.size() != sw.particles.size())
        throw std::invalid_argument("fitness size must match particle count");
    const auto& pp = sc.solver.pso;
    Boxes boxes = solution_boxes(sc);

    for (std::size_t i = 0; i < sw.particles.size(); ++i) {
        Particle& pt = sw.particles[i];
        if (!pt.has_best || fitness[i] > pt.best_objective) {
            pt.has_best = true;
            pt.best_objective = fitness[i];
            pt.best_position = pt.position;
        }
        if (!sw.has_best || pt.best_objective > sw.best_objective) {
            sw.has_best = true;
            sw.best_objective = pt.best_objective;
            sw.best_position = pt.best_position;
        }
    }

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t i = 0; i < sw.particles.size(); ++i) {
        Particle& pt = sw.particles[i];
        double h1 = u01(sw.streams[i]);
        double h2 = u01(sw.streams[i]);
        for (std::size_t j = 0; j < pt.position.size(); ++j) {
            double v = pp.inertia * pt.velocity[j] +
                       pp.cognitive * h1 * (pt.best_position[j] - pt.position[j]) +
                       pp.social * h2 * (sw.best_position[j] - pt.position[j]);
            double clamp = pp.velocity_clamp_frac * (boxes.hi[j] - boxes.lo[j]);
            v = std::clamp(v, -clamp, clamp);
            pt.velocity[j] = v;
            pt.position[j] = std::clamp(pt.position[j] + v, boxes.lo[j], boxes.hi[j]);
        }
        pt.position = encode_solution(repair(decode_solution(pt.position, sc), sc));
    }
    ++sw.epoch;
}

RunResult run_hybrid(const Scenario& sc, const RunOptions& opts) {
    const std::uint64_t seed = opts.seed.value_or(sc.solver.pso.seed);
    const int epochs = sc.solver.pso.epochs;
    const int n = sc.solver.pso.particles;
    const auto& nlp = sc.solver.nlp;
    MultimodalGraph g = build_graph(sc);
    Boxes boxes = solution_boxes(sc);

    Swarm sw = init_swarm(sc, seed);

    RunResult run;
    bool have_best = false;

    struct ParticleOutcome {
        double objective = 0.0;
        double post_objective = 0.0;
        double cost = 0.0;
        std::vector<double> position;
        EvalResult eval;
    };

    // Evaluate one particle and, in hybrid mode, refine it through the local
    // sub-problem until the objective settles.
    auto process = [&](int i, int epoch) {
        ParticleOutcome out;
        check_in_boxes(sw.particles[i].position, boxes);
        Solution sol = decode_solution(sw.particles[i].position, sc);
        EvalResult ev = evaluate(sol, sc, g);
        out.objective = ev.objective;
        if (!opts.pso_only) {
            for (int it = 0; it < nlp.max_inner_iters; ++it) {
                ReferenceState ref = extract_reference(ev, sc);
                SubSolution start{sol.freq_per_h, sol.fleet, ev.wait_min};
                std::uint64_t nlp_seed =
                    derive_seed(seed, kTagNlp, static_cast<std::uint64_t>(i),
                                static_cast<std::uint64_t>(epoch) * 1000 +
                                    static_cast<std::uint64_t>(it));
                Solution cand = solve_local(ref, sc, start, nlp_seed);
                EvalResult cev = evaluate(cand, sc, g);
                double change = cev.objective - ev.objective;
                if (cev.objective > ev.objective) {
                    sol = std::move(cand);
                    ev = std::move(cev);
                }
                if (std::abs(change) < nlp.obj_tol) break;
            }
        }
        out.post_objective = ev.objective;
        out.cost = ev.cost;
        out.position = encode_solution(sol);
        out.eval = std::move(ev);
        return out;
    };

    std::vector<ParticleOutcome> outcomes(n);
    auto run_epoch = [&](int epoch, bool record) {
        parallel_for(n, opts.threads, [&](int i) { outcomes[i] = process(i, epoch); });

        double mean = 0.0;
        for (int i = 0; i < n; ++i) {
            sw.particles[i].position = outcomes[i].position;
            mean += outcomes[i].post_objective;
            if (!have_best || outcomes[i].post_objective > run.best_eval.objective) {
                have_best = true;
                run.best = decode_solution(outcomes[i].position, sc);
                run.best_eval = outcomes[i].eval;
            }
            if (record)
                run.history.records.push_back({epoch, i, outcomes[i].objective,
                                               outcomes[i].post_objective,
                                               outcomes[i].cost});
        }
        mean /= n;

        std::vector<double> fitness(n);
        for (int i = 0; i < n; ++i) fitness[i] = outcomes[i].post_objective;
        step(sw, sc, fitness);
        if (record) run.history.epochs.push_back({epoch, sw.best_objective, mean});
    };

    if (epochs == 0) {
        run_epoch(0, /*record=*/false);
    } else {
        for (int e = 0; e < epochs; ++e) run_epoch(e, /*record=*/true);
    }

    if (!have_best) throw std::logic_error("no particle was evaluated");
    return run;
}

void write_history_csv(const RunHistory& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write history file '" + path + "'");
    out << "epoch,particle,objective,post_nlp_objective,cost\n";
    for (const auto& r : h.records)
        out << r.epoch << "," << r.particle << "," << format_double(r.objective) << ","
            << format_double(r.post_nlp_objective) << "," << format_double(r.cost) << "\n";
}

}  // namespace freqfleet
