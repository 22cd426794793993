#include "freqfleet/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace freqfleet {

using nlohmann::json;

namespace {

std::string violations_message(const std::vector<Violation>& vs) {
    std::ostringstream os;
    os << "scenario validation failed (" << vs.size() << " violation"
       << (vs.size() == 1 ? "" : "s") << "):";
    for (const auto& v : vs) os << "\n  " << v.code << " at " << v.path << ": " << v.message;
    return os.str();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known) throw ScenarioError("unknown key '" + path + "." + it.key() + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError("missing key '" + path + "." + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ScenarioError("expected number at " + path);
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ScenarioError("expected integer at " + path);
    return v.get<int>();
}

double num_field(const json& obj, const char* key, const std::string& path) {
    return as_number(require(obj, key, path), path + "." + key);
}

int int_field(const json& obj, const char* key, const std::string& path) {
    return as_int(require(obj, key, path), path + "." + key);
}

// Optional scalar with default: present -> parsed, absent -> unchanged.
void opt_num(const json& obj, const char* key, const std::string& path, double& out) {
    auto it = obj.find(key);
    if (it != obj.end()) out = as_number(*it, path + "." + key);
}

void opt_int(const json& obj, const char* key, const std::string& path, int& out) {
    auto it = obj.find(key);
    if (it != obj.end()) out = as_int(*it, path + "." + key);
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array()) throw ScenarioError("expected array at " + path + "." + key);
    return v;
}

Solution solution_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ScenarioError("expected object at " + path);
    reject_unknown_keys(j, {"freq_per_h", "fleet"}, path);
    Solution sol;
    const json& freq = require_array(j, "freq_per_h", path);
    for (std::size_t p = 0; p < freq.size(); ++p) {
        const json& row = freq[p];
        std::string rp = path + ".freq_per_h[" + std::to_string(p) + "]";
        if (!row.is_array()) throw ScenarioError("expected array at " + rp);
        std::vector<double> vals;
        for (std::size_t k = 0; k < row.size(); ++k)
            vals.push_back(as_number(row[k], rp + "[" + std::to_string(k) + "]"));
        sol.freq_per_h.push_back(std::move(vals));
    }
    const json& fleet = require_array(j, "fleet", path);
    for (std::size_t k = 0; k < fleet.size(); ++k)
        sol.fleet.push_back(as_number(fleet[k], path + ".fleet[" + std::to_string(k) + "]"));
    return sol;
}

json solution_to_json(const Solution& sol) {
    json j;
    j["freq_per_h"] = sol.freq_per_h;
    j["fleet"] = sol.fleet;
    return j;
}

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("scenario document must be a JSON object");
    reject_unknown_keys(doc,
                        {"periods", "modes", "patterns", "zones", "demand", "choice",
                         "sams", "budget", "solver", "baseline"},
                        "$");
    Scenario sc;

    const json& periods = require_array(doc, "periods", "$");
    for (std::size_t i = 0; i < periods.size(); ++i) {
        std::string p = "$.periods[" + std::to_string(i) + "]";
        const json& o = periods[i];
        reject_unknown_keys(o, {"id", "duration_h"}, p);
        sc.periods.push_back({int_field(o, "id", p), num_field(o, "duration_h", p)});
    }

    const json& modes = require_array(doc, "modes", "$");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        std::string p = "$.modes[" + std::to_string(i) + "]";
        const json& o = modes[i];
        reject_unknown_keys(o, {"id", "vehicle_capacity", "unit_op_cost"}, p);
        sc.modes.push_back({int_field(o, "id", p), num_field(o, "vehicle_capacity", p),
                            num_field(o, "unit_op_cost", p)});
    }

    const json& patterns = require_array(doc, "patterns", "$");
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        std::string p = "$.patterns[" + std::to_string(i) + "]";
        const json& o = patterns[i];
        reject_unknown_keys(o, {"id", "mode", "cycle_time_h", "max_frequency",
                                "stop_sequence", "segment_times_min"}, p);
        Pattern pat;
        pat.id = int_field(o, "id", p);
        pat.mode = int_field(o, "mode", p);
        pat.cycle_time_h = num_field(o, "cycle_time_h", p);
        pat.max_frequency = num_field(o, "max_frequency", p);
        const json& stops = require_array(o, "stop_sequence", p);
        for (std::size_t s = 0; s < stops.size(); ++s)
            pat.stop_sequence.push_back(as_int(stops[s], p + ".stop_sequence[" + std::to_string(s) + "]"));
        const json& segs = require_array(o, "segment_times_min", p);
        for (std::size_t s = 0; s < segs.size(); ++s)
            pat.segment_times_min.push_back(as_number(segs[s], p + ".segment_times_min[" + std::to_string(s) + "]"));
        sc.patterns.push_back(std::move(pat));
    }

    const json& zones = require_array(doc, "zones", "$");
    for (std::size_t i = 0; i < zones.size(); ++i) {
        std::string p = "$.zones[" + std::to_string(i) + "]";
        const json& o = zones[i];
        reject_unknown_keys(o, {"id", "walk_access", "feeder_access"}, p);
        Zone z;
        z.id = int_field(o, "id", p);
        if (auto it = o.find("walk_access"); it != o.end()) {
            for (std::size_t a = 0; a < it->size(); ++a) {
                std::string ap = p + ".walk_access[" + std::to_string(a) + "]";
                const json& e = (*it)[a];
                reject_unknown_keys(e, {"stop", "walk_time_min"}, ap);
                z.walk_access.push_back({int_field(e, "stop", ap), num_field(e, "walk_time_min", ap)});
            }
        }
        if (auto it = o.find("feeder_access"); it != o.end()) {
            for (std::size_t a = 0; a < it->size(); ++a) {
                std::string ap = p + ".feeder_access[" + std::to_string(a) + "]";
                const json& e = (*it)[a];
                reject_unknown_keys(e, {"stop", "ride_time_min"}, ap);
                z.feeder_access.push_back({int_field(e, "stop", ap), num_field(e, "ride_time_min", ap)});
            }
        }
        sc.zones.push_back(std::move(z));
    }

    const json& demand = require_array(doc, "demand", "$");
    for (std::size_t i = 0; i < demand.size(); ++i) {
        std::string p = "$.demand[" + std::to_string(i) + "]";
        const json& o = demand[i];
        reject_unknown_keys(o, {"origin", "destination", "period", "trips_per_h",
                                "transit_fare", "p2p_sams_utility", "drive_utility"}, p);
        DemandEntry e;
        e.origin = int_field(o, "origin", p);
        e.destination = int_field(o, "destination", p);
        e.period = int_field(o, "period", p);
        e.trips_per_h = num_field(o, "trips_per_h", p);
        e.transit_fare = num_field(o, "transit_fare", p);
        e.p2p_sams_utility = num_field(o, "p2p_sams_utility", p);
        e.drive_utility = num_field(o, "drive_utility", p);
        sc.demand.push_back(e);
    }

    if (auto it = doc.find("choice"); it != doc.end()) {
        const std::string p = "$.choice";
        reject_unknown_keys(*it, {"asc_transit", "beta_time", "beta_fare", "wait_factor",
                                  "walk_factor", "transfer_penalty_min"}, p);
        opt_num(*it, "asc_transit", p, sc.choice.asc_transit);
        opt_num(*it, "beta_time", p, sc.choice.beta_time);
        opt_num(*it, "beta_fare", p, sc.choice.beta_fare);
        opt_num(*it, "wait_factor", p, sc.choice.wait_factor);
        opt_num(*it, "walk_factor", p, sc.choice.walk_factor);
        opt_num(*it, "transfer_penalty_min", p, sc.choice.transfer_penalty_min);
    }

    if (auto it = doc.find("sams"); it != doc.end()) {
        const std::string p = "$.sams";
        reject_unknown_keys(*it, {"min_wait_min", "cutoff_lo", "cutoff_hi", "slope_lo_min",
                                  "slope_hi_min", "avg_occupancy", "unit_op_cost", "max_fleet",
                                  "fp_step_approx", "fp_step_calc", "fp_tol_min", "max_wait_min"}, p);
        opt_num(*it, "min_wait_min", p, sc.sams.min_wait_min);
        opt_num(*it, "cutoff_lo", p, sc.sams.cutoff_lo);
        opt_num(*it, "cutoff_hi", p, sc.sams.cutoff_hi);
        opt_num(*it, "slope_lo_min", p, sc.sams.slope_lo_min);
        opt_num(*it, "slope_hi_min", p, sc.sams.slope_hi_min);
        opt_num(*it, "avg_occupancy", p, sc.sams.avg_occupancy);
        opt_num(*it, "unit_op_cost", p, sc.sams.unit_op_cost);
        opt_num(*it, "max_fleet", p, sc.sams.max_fleet);
        opt_num(*it, "fp_step_approx", p, sc.sams.fp_step_approx);
        opt_num(*it, "fp_step_calc", p, sc.sams.fp_step_calc);
        opt_num(*it, "fp_tol_min", p, sc.sams.fp_tol_min);
        opt_num(*it, "max_wait_min", p, sc.sams.max_wait_min);
    }

    if (auto it = doc.find("budget"); it != doc.end()) {
        reject_unknown_keys(*it, {"daily_budget"}, "$.budget");
        opt_num(*it, "daily_budget", "$.budget", sc.budget.daily_budget);
    }

    if (auto it = doc.find("solver"); it != doc.end()) {
        reject_unknown_keys(*it, {"pso", "nlp"}, "$.solver");
        if (auto ps = it->find("pso"); ps != it->end()) {
            const std::string p = "$.solver.pso";
            reject_unknown_keys(*ps, {"epochs", "particles", "inertia", "cognitive", "social",
                                      "velocity_clamp_frac", "seed"}, p);
            opt_int(*ps, "epochs", p, sc.solver.pso.epochs);
            opt_int(*ps, "particles", p, sc.solver.pso.particles);
            opt_num(*ps, "inertia", p, sc.solver.pso.inertia);
            opt_num(*ps, "cognitive", p, sc.solver.pso.cognitive);
            opt_num(*ps, "social", p, sc.solver.pso.social);
            opt_num(*ps, "velocity_clamp_frac", p, sc.solver.pso.velocity_clamp_frac);
            if (auto s = ps->find("seed"); s != ps->end()) {
                if (!s->is_number_unsigned() && !s->is_number_integer())
                    throw ScenarioError("expected integer at $.solver.pso.seed");
                sc.solver.pso.seed = s->get<std::uint64_t>();
            }
        }
        if (auto nl = it->find("nlp"); nl != it->end()) {
            const std::string p = "$.solver.nlp";
            reject_unknown_keys(*nl, {"reg", "freq_expand", "wait_shrink", "elasticity_lo",
                                      "elasticity_hi", "obj_tol", "max_inner_iters",
                                      "multistart_count", "perturb_sigma_frac",
                                      "softmax_sharpness"}, p);
            opt_num(*nl, "reg", p, sc.solver.nlp.reg);
            opt_num(*nl, "freq_expand", p, sc.solver.nlp.freq_expand);
            opt_num(*nl, "wait_shrink", p, sc.solver.nlp.wait_shrink);
            opt_num(*nl, "elasticity_lo", p, sc.solver.nlp.elasticity_lo);
            opt_num(*nl, "elasticity_hi", p, sc.solver.nlp.elasticity_hi);
            opt_num(*nl, "obj_tol", p, sc.solver.nlp.obj_tol);
            opt_int(*nl, "max_inner_iters", p, sc.solver.nlp.max_inner_iters);
            opt_int(*nl, "multistart_count", p, sc.solver.nlp.multistart_count);
            opt_num(*nl, "perturb_sigma_frac", p, sc.solver.nlp.perturb_sigma_frac);
            opt_num(*nl, "softmax_sharpness", p, sc.solver.nlp.softmax_sharpness);
        }
    }

    if (auto it = doc.find("baseline"); it != doc.end() && !it->is_null())
        sc.baseline = solution_from_json(*it, "$.baseline");

    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json doc;
    doc["periods"] = json::array();
    for (const auto& k : sc.periods)
        doc["periods"].push_back({{"id", k.id}, {"duration_h", k.duration_h}});
    doc["modes"] = json::array();
    for (const auto& m : sc.modes)
        doc["modes"].push_back({{"id", m.id},
                                {"vehicle_capacity", m.vehicle_capacity},
                                {"unit_op_cost", m.unit_op_cost}});
    doc["patterns"] = json::array();
    for (const auto& p : sc.patterns)
        doc["patterns"].push_back({{"id", p.id},
                                   {"mode", p.mode},
                                   {"cycle_time_h", p.cycle_time_h},
                                   {"max_frequency", p.max_frequency},
                                   {"stop_sequence", p.stop_sequence},
                                   {"segment_times_min", p.segment_times_min}});
    doc["zones"] = json::array();
    for (const auto& z : sc.zones) {
        json jz{{"id", z.id}};
        jz["walk_access"] = json::array();
        for (const auto& a : z.walk_access)
            jz["walk_access"].push_back({{"stop", a.stop}, {"walk_time_min", a.walk_time_min}});
        jz["feeder_access"] = json::array();
        for (const auto& a : z.feeder_access)
            jz["feeder_access"].push_back({{"stop", a.stop}, {"ride_time_min", a.ride_time_min}});
        doc["zones"].push_back(std::move(jz));
    }
    doc["demand"] = json::array();
    for (const auto& e : sc.demand)
        doc["demand"].push_back({{"origin", e.origin},
                                 {"destination", e.destination},
                                 {"period", e.period},
                                 {"trips_per_h", e.trips_per_h},
                                 {"transit_fare", e.transit_fare},
                                 {"p2p_sams_utility", e.p2p_sams_utility},
                                 {"drive_utility", e.drive_utility}});
    doc["choice"] = {{"asc_transit", sc.choice.asc_transit},
                     {"beta_time", sc.choice.beta_time},
                     {"beta_fare", sc.choice.beta_fare},
                     {"wait_factor", sc.choice.wait_factor},
                     {"walk_factor", sc.choice.walk_factor},
                     {"transfer_penalty_min", sc.choice.transfer_penalty_min}};
    doc["sams"] = {{"min_wait_min", sc.sams.min_wait_min},
                   {"cutoff_lo", sc.sams.cutoff_lo},
                   {"cutoff_hi", sc.sams.cutoff_hi},
                   {"slope_lo_min", sc.sams.slope_lo_min},
                   {"slope_hi_min", sc.sams.slope_hi_min},
                   {"avg_occupancy", sc.sams.avg_occupancy},
                   {"unit_op_cost", sc.sams.unit_op_cost},
                   {"max_fleet", sc.sams.max_fleet},
                   {"fp_step_approx", sc.sams.fp_step_approx},
                   {"fp_step_calc", sc.sams.fp_step_calc},
                   {"fp_tol_min", sc.sams.fp_tol_min},
                   {"max_wait_min", sc.sams.max_wait_min}};
    doc["budget"] = {{"daily_budget", sc.budget.daily_budget}};
    doc["solver"] = {{"pso",
                      {{"epochs", sc.solver.pso.epochs},
                       {"particles", sc.solver.pso.particles},
                       {"inertia", sc.solver.pso.inertia},
                       {"cognitive", sc.solver.pso.cognitive},
                       {"social", sc.solver.pso.social},
                       {"velocity_clamp_frac", sc.solver.pso.velocity_clamp_frac},
                       {"seed", sc.solver.pso.seed}}},
                     {"nlp",
                      {{"reg", sc.solver.nlp.reg},
                       {"freq_expand", sc.solver.nlp.freq_expand},
                       {"wait_shrink", sc.solver.nlp.wait_shrink},
                       {"elasticity_lo", sc.solver.nlp.elasticity_lo},
                       {"elasticity_hi", sc.solver.nlp.elasticity_hi},
                       {"obj_tol", sc.solver.nlp.obj_tol},
                       {"max_inner_iters", sc.solver.nlp.max_inner_iters},
                       {"multistart_count", sc.solver.nlp.multistart_count},
                       {"perturb_sigma_frac", sc.solver.nlp.perturb_sigma_frac},
                       {"softmax_sharpness", sc.solver.nlp.softmax_sharpness}}}};
    if (sc.baseline) doc["baseline"] = solution_to_json(*sc.baseline);
    return doc;
}

// "a.b.c=value" applied onto the document; intermediate objects are created,
// the leaf must survive the strict-key parse afterwards.
void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ScenarioError("override '" + assignment + "' is not KEY=VALUE");
    std::string key = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, '.')) parts.push_back(tok);
    if (parts.empty()) throw ScenarioError("override '" + assignment + "' has an empty key");
    if (parts[0] != "choice" && parts[0] != "sams" && parts[0] != "solver")
        throw ScenarioError("override key '" + key +
                            "' must start with choice., sams. or solver.");

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare strings stay strings
    }

    json* cur = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!cur->is_object()) throw ScenarioError("override key '" + key + "' crosses a non-object");
        cur = &(*cur)[parts[i]];
        if (cur->is_null()) *cur = json::object();
    }
    (*cur)[parts.back()] = parsed;
}

Scenario parse_document(json doc, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) apply_override(doc, ov);
    Scenario sc = scenario_from_json(doc);
    auto vs = validate(sc);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    return sc;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : ScenarioError(violations_message(violations)), violations_(std::move(violations)) {}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("parse error in '" + path + "': " + e.what());
    }
    return parse_document(std::move(doc), overrides);
}

Scenario parse_scenario_text(const std::string& text, const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("parse error: ") + e.what());
    }
    return parse_document(std::move(doc), overrides);
}

std::string scenario_to_json_text(const Scenario& sc) { return scenario_to_json(sc).dump(2); }

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
    out << scenario_to_json_text(sc) << "\n";
}

Solution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open solution file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("parse error in '" + path + "': " + e.what());
    }
    return solution_from_json(doc, "$");
}

Solution parse_solution_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("parse error: ") + e.what());
    }
    return solution_from_json(doc, "$");
}

std::string solution_to_json_text(const Solution& sol) { return solution_to_json(sol).dump(2); }

void save_solution(const Solution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write solution file '" + path + "'");
    out << solution_to_json_text(sol) << "\n";
}

namespace {

void check(std::vector<Violation>& out, bool ok, const char* code, std::string path,
           std::string message) {
    if (!ok) out.push_back({code, std::move(path), std::move(message)});
}

}  // namespace

std::vector<Violation> validate(const Scenario& sc) {
    std::vector<Violation> out;

    for (std::size_t i = 0; i < sc.periods.size(); ++i) {
        const auto& k = sc.periods[i];
        std::string p = "periods[" + std::to_string(i) + "]";
        check(out, k.id == static_cast<int>(i), "PeriodIdNotContiguous", p + ".id",
              "period ids must be 0..n-1 in order");
        check(out, k.duration_h > 0, "DurationNonpositive", p + ".duration_h",
              "period duration must be > 0");
    }

    for (std::size_t i = 0; i < sc.modes.size(); ++i) {
        const auto& m = sc.modes[i];
        std::string p = "modes[" + std::to_string(i) + "]";
        check(out, m.id == static_cast<int>(i), "ModeIdNotContiguous", p + ".id",
              "mode ids must be 0..n-1 in order");
        check(out, m.vehicle_capacity > 0, "CapacityNonpositive", p + ".vehicle_capacity",
              "vehicle capacity must be > 0");
        check(out, m.unit_op_cost >= 0, "ModeCostNegative", p + ".unit_op_cost",
              "unit operating cost must be >= 0");
    }

    std::set<int> served_stops;
    for (const auto& pat : sc.patterns)
        served_stops.insert(pat.stop_sequence.begin(), pat.stop_sequence.end());

    for (std::size_t i = 0; i < sc.patterns.size(); ++i) {
        const auto& pat = sc.patterns[i];
        std::string p = "patterns[" + std::to_string(i) + "]";
        check(out, pat.id == static_cast<int>(i), "PatternIdNotContiguous", p + ".id",
              "pattern ids must be 0..n-1 in order");
        check(out, pat.mode >= 0 && pat.mode < static_cast<int>(sc.modes.size()),
              "PatternModeInvalid", p + ".mode", "pattern references an unknown mode");
        check(out, pat.cycle_time_h > 0, "CycleTimeNonpositive", p + ".cycle_time_h",
              "cycle time must be > 0");
        check(out, pat.max_frequency > 0, "FreqBoundNonpositive", p + ".max_frequency",
              "max frequency must be > 0");
        check(out, pat.segment_times_min.size() + 1 == pat.stop_sequence.size() ||
                       (pat.stop_sequence.empty() && pat.segment_times_min.empty()),
              "SegmentCountMismatch", p + ".segment_times_min",
              "need exactly one segment time per consecutive stop pair");
        for (std::size_t s = 0; s < pat.segment_times_min.size(); ++s)
            check(out, pat.segment_times_min[s] > 0, "SegmentTimeNonpositive",
                  p + ".segment_times_min[" + std::to_string(s) + "]",
                  "segment times must be > 0");
        for (std::size_t s = 0; s < pat.stop_sequence.size(); ++s)
            check(out, pat.stop_sequence[s] >= 0, "StopIdNegative",
                  p + ".stop_sequence[" + std::to_string(s) + "]", "stop ids must be >= 0");
    }

    for (std::size_t i = 0; i < sc.zones.size(); ++i) {
        const auto& z = sc.zones[i];
        std::string p = "zones[" + std::to_string(i) + "]";
        check(out, z.id == static_cast<int>(i), "ZoneIdNotContiguous", p + ".id",
              "zone ids must be 0..n-1 in order");
        for (std::size_t a = 0; a < z.walk_access.size(); ++a) {
            std::string ap = p + ".walk_access[" + std::to_string(a) + "]";
            check(out, z.walk_access[a].walk_time_min > 0, "WalkTimeNonpositive",
                  ap + ".walk_time_min", "walk times must be > 0");
            check(out, served_stops.count(z.walk_access[a].stop) > 0, "WalkStopNotServed",
                  ap + ".stop", "walk access stop is not on any pattern");
        }
        for (std::size_t a = 0; a < z.feeder_access.size(); ++a) {
            std::string ap = p + ".feeder_access[" + std::to_string(a) + "]";
            check(out, z.feeder_access[a].ride_time_min > 0, "RideTimeNonpositive",
                  ap + ".ride_time_min", "feeder ride times must be > 0");
            check(out, served_stops.count(z.feeder_access[a].stop) > 0, "FeederStopNotServed",
                  ap + ".stop", "feeder access stop is not on any pattern");
        }
    }

    for (std::size_t i = 0; i < sc.demand.size(); ++i) {
        const auto& e = sc.demand[i];
        std::string p = "demand[" + std::to_string(i) + "]";
        check(out, e.trips_per_h >= 0, "DemandNegative", p + ".trips_per_h",
              "demand must be >= 0");
        check(out, e.origin != e.destination, "DemandSelfLoop", p,
              "origin and destination must differ");
        bool zones_ok = e.origin >= 0 && e.origin < static_cast<int>(sc.zones.size()) &&
                        e.destination >= 0 && e.destination < static_cast<int>(sc.zones.size());
        check(out, zones_ok, "DemandZoneInvalid", p, "demand references an unknown zone");
        check(out, e.period >= 0 && e.period < static_cast<int>(sc.periods.size()),
              "DemandPeriodInvalid", p + ".period", "demand references an unknown period");
    }

    {
        const auto& c = sc.choice;
        check(out, c.beta_time < 0, "BetaTimeNotNegative", "choice.beta_time",
              "time coefficient must be < 0");
        check(out, c.beta_fare < 0, "BetaFareNotNegative", "choice.beta_fare",
              "fare coefficient must be < 0");
        check(out, c.wait_factor >= 1, "WaitFactorBelowOne", "choice.wait_factor",
              "wait factor must be >= 1");
        check(out, c.walk_factor >= 1, "WalkFactorBelowOne", "choice.walk_factor",
              "walk factor must be >= 1");
        check(out, c.transfer_penalty_min >= 0, "TransferPenaltyNegative",
              "choice.transfer_penalty_min", "transfer penalty must be >= 0");
    }

    {
        const auto& s = sc.sams;
        check(out, s.cutoff_lo > 0 && s.cutoff_lo < s.cutoff_hi, "CutoffOrderInvalid",
              "sams.cutoff_lo", "need 0 < cutoff_lo < cutoff_hi");
        check(out, s.slope_lo_min > 0 && s.slope_hi_min > 0, "SlopeNonpositive",
              "sams.slope_lo_min", "wait slopes must be > 0");
        bool convex = std::abs(s.fp_step_approx + s.fp_step_calc - 1.0) <= 1e-9 &&
                      s.fp_step_approx > 0 && s.fp_step_approx < 1 &&
                      s.fp_step_calc > 0 && s.fp_step_calc < 1;
        check(out, convex, "StepSizesNotConvex", "sams.fp_step_approx",
              "fixed-point step sizes must be in (0,1) and sum to 1");
        check(out, s.fp_tol_min > 0, "FpTolNonpositive", "sams.fp_tol_min",
              "fixed-point tolerance must be > 0");
        check(out, s.avg_occupancy > 0, "OccupancyNonpositive", "sams.avg_occupancy",
              "average occupancy must be > 0");
        check(out, s.min_wait_min >= 0, "MinWaitNegative", "sams.min_wait_min",
              "minimum wait must be >= 0");
        check(out, s.max_wait_min > 0, "MaxWaitNonpositive", "sams.max_wait_min",
              "maximum wait must be > 0");
        check(out, s.max_fleet >= 0, "FleetBoundNegative", "sams.max_fleet",
              "fleet bound must be >= 0");
        check(out, s.unit_op_cost >= 0, "SamsCostNegative", "sams.unit_op_cost",
              "unit operating cost must be >= 0");
    }

    check(out, sc.budget.daily_budget > 0, "BudgetNonpositive", "budget.daily_budget",
          "daily budget must be > 0");

    {
        const auto& p = sc.solver.pso;
        check(out, p.epochs >= 0, "EpochsNegative", "solver.pso.epochs",
              "epoch count must be >= 0");
        check(out, p.particles >= 1, "ParticlesNonpositive", "solver.pso.particles",
              "particle count must be >= 1");
        check(out, p.velocity_clamp_frac > 0, "VelocityClampInvalid",
              "solver.pso.velocity_clamp_frac", "velocity clamp fraction must be > 0");
    }
    {
        const auto& n = sc.solver.nlp;
        check(out, n.reg >= 0, "RegNegative", "solver.nlp.reg",
              "regularization must be >= 0");
        check(out, n.freq_expand > 1, "FreqExpandNotAboveOne", "solver.nlp.freq_expand",
              "frequency expansion factor must be > 1");
        check(out, n.wait_shrink > 0 && n.wait_shrink < 1, "WaitShrinkOutOfRange",
              "solver.nlp.wait_shrink", "wait shrink factor must be in (0,1)");
        check(out, n.elasticity_lo >= 0 && n.elasticity_lo < n.elasticity_hi,
              "ElasticityBoundsInvalid", "solver.nlp.elasticity_lo",
              "need 0 <= elasticity_lo < elasticity_hi");
        check(out, n.obj_tol > 0, "ObjTolNonpositive", "solver.nlp.obj_tol",
              "objective tolerance must be > 0");
        check(out, n.max_inner_iters >= 1, "InnerItersNonpositive",
              "solver.nlp.max_inner_iters", "inner iteration cap must be >= 1");
        check(out, n.multistart_count >= 1, "MultistartNonpositive",
              "solver.nlp.multistart_count", "multi-start count must be >= 1");
        check(out, n.perturb_sigma_frac >= 0, "PerturbSigmaNegative",
              "solver.nlp.perturb_sigma_frac", "perturbation sigma must be >= 0");
        check(out, n.softmax_sharpness > 0, "SharpnessNonpositive",
              "solver.nlp.softmax_sharpness", "smoothing sharpness must be > 0");
    }

    if (sc.baseline) {
        const auto& b = *sc.baseline;
        bool shape = b.freq_per_h.size() == sc.patterns.size() &&
                     b.fleet.size() == sc.periods.size();
        if (shape)
            for (const auto& row : b.freq_per_h)
                if (row.size() != sc.periods.size()) shape = false;
        check(out, shape, "BaselineShapeInvalid", "baseline",
              "baseline dimensions must be |patterns| x |periods| and |periods|");
    }

    return out;
}

}  // namespace freqfleet
