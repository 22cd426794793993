#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "freqfleet/evaluator.hpp"
#include "freqfleet/pso.hpp"
#include "freqfleet/scenario.hpp"
#include "freqfleet/util.hpp"

namespace {

using namespace freqfleet;

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

bool solution_matches(const Solution& sol, const Scenario& sc) {
    if (sol.freq_per_h.size() != sc.patterns.size()) return false;
    for (const auto& row : sol.freq_per_h)
        if (row.size() != sc.periods.size()) return false;
    return sol.fleet.size() == sc.periods.size();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
            bool pso_only, int threads) {
    Scenario sc = load_scenario(scenario_path, overrides);
    std::filesystem::create_directories(out_dir);

    RunOptions opts;
    opts.pso_only = pso_only;
    opts.threads = threads;
    opts.seed = seed;
    RunResult run = run_hybrid(sc, opts);

    save_solution(run.best, out_dir + "/solution.json");
    write_history_csv(run.history, out_dir + "/history.csv");
    write_eval_csv(run.best_eval, sc, out_dir);

    std::cout << "objective " << format_double(run.best_eval.objective) << "\n"
              << "cost " << format_double(run.best_eval.cost) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& scenario_path, const std::string& solution_path,
                 const std::string& out_dir, const std::vector<std::string>& overrides,
                 bool do_repair) {
    Scenario sc = load_scenario(scenario_path, overrides);
    Solution sol = load_solution(solution_path);
    if (!solution_matches(sol, sc)) {
        std::cerr << "error: solution dimensions do not match the scenario ("
                  << sc.patterns.size() << " patterns x " << sc.periods.size()
                  << " periods expected)\n";
        return 1;
    }
    if (do_repair) sol = repair(std::move(sol), sc);

    MultimodalGraph g = build_graph(sc);
    EvalResult res = evaluate(sol, sc, g);

    std::filesystem::create_directories(out_dir);
    write_eval_csv(res, sc, out_dir);

    std::cout << "objective " << format_double(res.objective) << "\n"
              << "cost " << format_double(res.cost) << "\n"
              << "feasible " << (res.feasible ? "yes" : "no") << "\n";
    return 0;
}

int cmd_oracle(const std::string& scenario_path, const std::string& out_dir,
               const std::vector<std::string>& overrides, const std::string& freq_csv,
               const std::string& fleet_csv) {
    Scenario sc = load_scenario(scenario_path, overrides);
    std::vector<double> freq_grid = parse_grid(freq_csv);
    std::vector<double> fleet_grid = parse_grid(fleet_csv);

    MultimodalGraph g = build_graph(sc);
    std::filesystem::create_directories(out_dir);

    std::ofstream grid_out(out_dir + "/oracle_grid.csv");
    for (std::size_t p = 0; p < sc.patterns.size(); ++p)
        for (std::size_t k = 0; k < sc.periods.size(); ++k)
            grid_out << "f_p" << p << "_k" << k << ",";
    for (std::size_t k = 0; k < sc.periods.size(); ++k) grid_out << "s_k" << k << ",";
    grid_out << "objective,cost\n";

    auto [best, best_eval] = brute_force(
        sc, g, freq_grid, fleet_grid, [&](const Solution& raw, const EvalResult& ev) {
            for (const auto& row : raw.freq_per_h)
                for (double f : row) grid_out << format_double(f) << ",";
            for (double s : raw.fleet) grid_out << format_double(s) << ",";
            grid_out << format_double(ev.objective) << "," << format_double(ev.cost) << "\n";
        });

    save_solution(best, out_dir + "/oracle_best.json");
    std::cout << "objective " << format_double(best_eval.objective) << "\n"
              << "cost " << format_double(best_eval.cost) << "\n";
    return 0;
}

int cmd_export_history(const std::string& history_path, const std::string& out_dir) {
    std::ifstream in(history_path);
    if (!in) {
        std::cerr << "error: cannot open history file '" << history_path << "'\n";
        return 1;
    }
    std::filesystem::create_directories(out_dir);

    std::string line;
    if (!std::getline(in, line) || line != "epoch,particle,objective,post_nlp_objective,cost") {
        std::cerr << "error: '" << history_path << "' is not a history file\n";
        return 1;
    }
    std::map<int, std::pair<double, int>> epoch_sum;  // epoch -> (sum, count)
    std::map<int, double> epoch_max;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() != 5) continue;
        int epoch = std::stoi(cols[0]);
        double post = std::stod(cols[3]);
        auto& [sum, count] = epoch_sum[epoch];
        sum += post;
        ++count;
        auto it = epoch_max.find(epoch);
        if (it == epoch_max.end() || post > it->second) epoch_max[epoch] = post;
    }

    std::ofstream out(out_dir + "/history_summary.csv");
    out << "epoch,best_objective,mean_objective\n";
    double running_best = 0.0;
    bool first = true;
    for (const auto& [epoch, sum_count] : epoch_sum) {
        double best = epoch_max[epoch];
        running_best = first ? best : std::max(running_best, best);
        first = false;
        out << epoch << "," << format_double(running_best) << ","
            << format_double(sum_count.first / sum_count.second) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint transit frequency and SAV feeder fleet optimizer"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".", solution_path, history_path;
    std::string freq_csv = "0,2,5,10,20", fleet_csv = "0,50,200";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false, pso_only = false, do_repair = false;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--set", overrides,
                        "override a parameter, e.g. --set solver.pso.epochs=2");
    };

    CLI::App* run = app.add_subcommand("run", "optimize a scenario");
    add_common(run, true);
    run->add_option("--seed", seed, "override solver.pso.seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_flag("--pso-only", pso_only, "skip the local improvement loop");
    run->add_option("--threads", threads, "worker threads (results are thread-invariant)");

    CLI::App* eval = app.add_subcommand("evaluate", "evaluate one solution");
    add_common(eval, true);
    eval->add_option("--solution", solution_path, "solution JSON file")->required();
    eval->add_flag("--repair", do_repair, "apply budget repair before evaluating");

    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive grid search");
    add_common(oracle, true);
    oracle->add_option("--freq-grid", freq_csv, "comma-separated frequency grid");
    oracle->add_option("--fleet-grid", fleet_csv, "comma-separated fleet grid");

    CLI::App* exp = app.add_subcommand("export-history", "per-epoch summary of a history.csv");
    exp->add_option("--history", history_path, "history.csv from a run")->required();
    exp->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, out_dir, overrides,
                           seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           pso_only, threads);
        if (eval->parsed())
            return cmd_evaluate(scenario_path, solution_path, out_dir, overrides, do_repair);
        if (oracle->parsed())
            return cmd_oracle(scenario_path, out_dir, overrides, freq_csv, fleet_csv);
        if (exp->parsed()) return cmd_export_history(history_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
