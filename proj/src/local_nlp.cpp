#include "freqfleet/local_nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "freqfleet/graph.hpp"

namespace freqfleet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFleetFloor = 1e-9;    // avoids 1/s blowing up at the box face
constexpr double kExpArgCap = 80.0;     // exp() overflow guard
constexpr double kNoFeederMark = -1e6;  // rejection argument when a period has no feeder use
constexpr int kMaxPgIters = 80;
constexpr int kMaxBacktracks = 40;
constexpr int kMaxPenaltyEscalations = 12;
constexpr double kBudgetTol = 1e-6;  // relative

// softplus at sharpness s: (1/s) ln(1 + e^{s x}); smooth max(0, x)
double softplus(double x, double s) {
    double z = s * x;
    if (z > 30.0) return x + std::log1p(std::exp(-z)) / s;
    return std::log1p(std::exp(z)) / s;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

struct SmoothClip {
    double lo, hi, s;
    double value(double y) const {
        double a = lo + softplus(y - lo, s);
        return hi - softplus(hi - a, s);
    }
    double deriv(double y) const {
        double a = lo + softplus(y - lo, s);
        return sigmoid(s * (hi - a)) * sigmoid(s * (y - lo));
    }
};

struct Flat {
    std::size_t P, K;
    std::size_t dim() const { return P * K + 2 * K; }
    std::size_t f(std::size_t p, std::size_t k) const { return p * K + k; }
    std::size_t s(std::size_t k) const { return P * K + k; }
    std::size_t u(std::size_t k) const { return P * K + K + k; }
};

std::vector<double> flatten(const SubSolution& x, const Flat& ix) {
    std::vector<double> v(ix.dim());
    for (std::size_t p = 0; p < ix.P; ++p)
        for (std::size_t k = 0; k < ix.K; ++k) v[ix.f(p, k)] = x.freq[p][k];
    for (std::size_t k = 0; k < ix.K; ++k) v[ix.s(k)] = x.fleet[k];
    for (std::size_t k = 0; k < ix.K; ++k) v[ix.u(k)] = x.wait_min[k];
    return v;
}

SubSolution unflatten(const std::vector<double>& v, const Flat& ix) {
    SubSolution x;
    x.freq.assign(ix.P, std::vector<double>(ix.K, 0.0));
    for (std::size_t p = 0; p < ix.P; ++p)
        for (std::size_t k = 0; k < ix.K; ++k) x.freq[p][k] = v[ix.f(p, k)];
    x.fleet.assign(v.begin() + ix.P * ix.K, v.begin() + ix.P * ix.K + ix.K);
    x.wait_min.assign(v.begin() + ix.P * ix.K + ix.K, v.end());
    return x;
}

double solution_cost(const std::vector<double>& v, const Flat& ix, const Scenario& sc) {
    double total = 0.0;
    for (std::size_t k = 0; k < ix.K; ++k) {
        double transit = 0.0;
        for (std::size_t p = 0; p < ix.P; ++p)
            transit += sc.modes[sc.patterns[p].mode].unit_op_cost *
                       sc.patterns[p].cycle_time_h * v[ix.f(p, k)];
        total += sc.periods[k].duration_h *
                 (transit + sc.sams.unit_op_cost * v[ix.s(k)]);
    }
    return total;
}

}  // namespace

ReferenceState extract_reference(const EvalResult& res, const Scenario& sc) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    ReferenceState ref;

    ref.ref_freq.assign(P, std::vector<double>(K, kMinActiveFrequency));
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k)
            ref.ref_freq[p][k] = std::max(res.solution.freq_per_h[p][k], kMinActiveFrequency);
    ref.ref_wait_min = res.wait_min;
    ref.ref_fleet = res.solution.fleet;
    ref.peak_demand = res.flows.pattern_peak;

    ref.od_transit_demand = res.transit_demand;
    ref.feeder_count.assign(sc.demand.size(), 0);
    ref.feeder_time_min.assign(sc.demand.size(), 0.0);
    ref.pattern_od.assign(P, std::vector<std::vector<int>>(K));
    ref.agg_demand.assign(P, std::vector<std::array<double, 3>>(K, {0.0, 0.0, 0.0}));
    ref.agg_feeder_pax_h.assign(P, std::vector<std::array<double, 3>>(K, {0.0, 0.0, 0.0}));

    for (std::size_t i = 0; i < sc.demand.size(); ++i) {
        const PathResult& pr = res.path_meta[i];
        if (!pr.reachable) continue;
        int k = sc.demand[i].period;
        int n = pr.feeder_link_count;
        ref.feeder_count[i] = n;
        ref.feeder_time_min[i] = pr.feeder_time_min;
        for (int p : pr.patterns_used) {
            ref.pattern_od[p][k].push_back(static_cast<int>(i));
            ref.agg_demand[p][k][n] += res.transit_demand[i];
            ref.agg_feeder_pax_h[p][k][n] += res.transit_demand[i] * pr.feeder_time_min / 60.0;
        }
    }
    return ref;
}

double elasticity_transit(double freq, double ref_freq, const Scenario& sc) {
    double c = sc.choice.beta_time * sc.choice.wait_factor / 2.0;
    double y = std::exp(std::min(c * (60.0 / freq - 60.0 / ref_freq), kExpArgCap));
    return std::clamp(y, sc.solver.nlp.elasticity_lo, sc.solver.nlp.elasticity_hi);
}

double elasticity_feeder(double wait_min, double ref_wait_min, int i, const Scenario& sc) {
    if (i == 0) return 1.0;
    double e = i * sc.choice.beta_time * sc.choice.wait_factor * (wait_min - ref_wait_min);
    double y = std::exp(std::min(e, kExpArgCap));
    return std::clamp(y, sc.solver.nlp.elasticity_lo, sc.solver.nlp.elasticity_hi);
}

SubBoxes sub_boxes(const ReferenceState& ref, const Scenario& sc) {
    Flat ix{sc.patterns.size(), sc.periods.size()};
    SubBoxes b;
    b.lo.assign(ix.dim(), 0.0);
    b.hi.assign(ix.dim(), 0.0);
    for (std::size_t p = 0; p < ix.P; ++p)
        for (std::size_t k = 0; k < ix.K; ++k) {
            b.lo[ix.f(p, k)] = 0.0;
            b.hi[ix.f(p, k)] = std::min(sc.solver.nlp.freq_expand * ref.ref_freq[p][k],
                                        sc.patterns[p].max_frequency);
        }
    for (std::size_t k = 0; k < ix.K; ++k) {
        b.lo[ix.s(k)] = 0.0;
        b.hi[ix.s(k)] = sc.sams.max_fleet;
        b.lo[ix.u(k)] = std::min(sc.solver.nlp.wait_shrink * ref.ref_wait_min[k],
                                 sc.sams.max_wait_min);
        b.hi[ix.u(k)] = sc.sams.max_wait_min;
    }
    return b;
}

SubObjective sub_objective(const SubSolution& x, const ReferenceState& ref,
                           const Scenario& sc) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    Flat ix{P, K};
    const auto& nlp = sc.solver.nlp;
    const double sharp = nlp.softmax_sharpness;
    const SmoothClip clip{nlp.elasticity_lo, nlp.elasticity_hi, 4.0 * sharp};
    const double lam0 = nlp.reg;
    const double bw = sc.choice.beta_time * sc.choice.wait_factor;  // < 0
    const double R = sc.sams.avg_occupancy;

    SubObjective out;
    out.gradient.assign(ix.dim(), 0.0);
    auto& grad = out.gradient;

    // transit elasticities and their frequency derivatives
    std::vector<double> yt(P * K), dyt_df(P * K);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k) {
            double f = x.freq[p][k];
            double ft = std::max(f, kMinActiveFrequency);
            double F = ref.ref_freq[p][k];
            double e = (bw / 2.0) * (60.0 / ft - 60.0 / F);
            double raw = std::exp(std::min(e, kExpArgCap));
            yt[ix.f(p, k)] = clip.value(raw);
            double de_df = f > kMinActiveFrequency ? (bw / 2.0) * (-60.0 / (ft * ft)) : 0.0;
            double draw = e < kExpArgCap ? raw * de_df : 0.0;
            dyt_df[ix.f(p, k)] = clip.deriv(raw) * draw;
        }

    // feeder elasticities and wait derivatives, per period and leg count
    std::vector<std::array<double, 3>> yx(K), dyx_du(K);
    for (std::size_t k = 0; k < K; ++k) {
        yx[k][0] = 1.0;
        dyx_du[k][0] = 0.0;
        for (int i = 1; i <= 2; ++i) {
            double e = i * bw * (x.wait_min[k] - ref.ref_wait_min[k]);
            double raw = std::exp(std::min(e, kExpArgCap));
            yx[k][i] = clip.value(raw);
            double draw = e < kExpArgCap ? raw * (i * bw) : 0.0;
            dyx_du[k][i] = clip.deriv(raw) * draw;
        }
    }

    for (std::size_t k = 0; k < K; ++k) {
        const double u = x.wait_min[k];
        const double U = ref.ref_wait_min[k];
        const double s_raw = x.fleet[k];
        const double s_eff = std::max(s_raw, kFleetFloor);

        bool any_feeder = false;
        for (std::size_t p = 0; p < P; ++p)
            if (ref.agg_feeder_pax_h[p][k][1] > 0.0 || ref.agg_feeder_pax_h[p][k][2] > 0.0)
                any_feeder = true;

        // utilization from elasticity-adjusted feeder passenger-hours
        double numer = 0.0;
        std::vector<double> wsum(P, 0.0);  // per pattern, before the 1/(R s) factor
        for (std::size_t p = 0; p < P; ++p) {
            wsum[p] = yx[k][1] * ref.agg_feeder_pax_h[p][k][1] +
                      yx[k][2] * ref.agg_feeder_pax_h[p][k][2];
            numer += yt[ix.f(p, k)] * wsum[p];
        }
        double rho = numer / (R * s_eff);
        double drho_ds = s_raw > kFleetFloor ? -rho / s_eff : 0.0;
        double drho_du = 0.0;
        for (std::size_t p = 0; p < P; ++p)
            drho_du += yt[ix.f(p, k)] *
                       (dyx_du[k][1] * ref.agg_feeder_pax_h[p][k][1] +
                        dyx_du[k][2] * ref.agg_feeder_pax_h[p][k][2]) /
                       (R * s_eff);

        // wait implied by the utilization curve, capped at the ceiling
        const SamsParams& sp = sc.sams;
        double wraw = sp.min_wait_min + sp.slope_lo_min * softplus(rho - sp.cutoff_lo, sharp) +
                      (sp.slope_hi_min - sp.slope_lo_min) * softplus(rho - sp.cutoff_hi, sharp);
        double dwraw = sp.slope_lo_min * sigmoid(sharp * (rho - sp.cutoff_lo)) +
                       (sp.slope_hi_min - sp.slope_lo_min) *
                           sigmoid(sharp * (rho - sp.cutoff_hi));
        double wfit = sp.max_wait_min - softplus(sp.max_wait_min - wraw, sharp);
        double dwfit_drho = sigmoid(sharp * (sp.max_wait_min - wraw)) * dwraw;

        double sum_schi_fd = 0.0;  // sum of chi softmax weight * feeder demand
        double du_accum = 0.0;

        for (std::size_t p = 0; p < P; ++p) {
            double y = yt[ix.f(p, k)];
            double dy = dyt_df[ix.f(p, k)];
            const auto& qn = ref.agg_demand[p][k];
            double feeder_q = yx[k][1] * qn[1] + yx[k][2] * qn[2];
            double dfeeder_q_du = dyx_du[k][1] * qn[1] + dyx_du[k][2] * qn[2];

            double qphi = y * (qn[0] + feeder_q);
            double fd = y * feeder_q;
            double a_tau = y * ref.peak_demand[p][k] -
                           sc.modes[sc.patterns[p].mode].vehicle_capacity * x.freq[p][k];
            double a_chi = any_feeder ? (1.0 - 1.0 / rho) * fd : kNoFeederMark;

            // smoothed max(0, a_tau, a_chi)
            double m = std::max({0.0, a_tau, a_chi});
            double e0 = std::exp(sharp * (0.0 - m));
            double et = std::exp(sharp * (a_tau - m));
            double ec = std::exp(sharp * (a_chi - m));
            double z = e0 + et + ec;
            double lse = m + std::log(z) / sharp;
            double sig_tau = et / z;
            double sig_chi = ec / z;

            double f = x.freq[p][k];
            double F = ref.ref_freq[p][k];
            out.value += qphi - lse - lam0 * (f - F) * (f - F);

            double g = dy * (qn[0] + feeder_q);                      // q^phi
            g -= sig_tau * (dy * ref.peak_demand[p][k] -
                            sc.modes[sc.patterns[p].mode].vehicle_capacity);
            if (any_feeder) g -= sig_chi * (1.0 - 1.0 / rho) * feeder_q * dy;
            g -= 2.0 * lam0 * (f - F);
            grad[ix.f(p, k)] += g;

            if (any_feeder) {
                sum_schi_fd += sig_chi * fd;
                // direct u-dependence of q^phi and the chi rejection
                du_accum += y * dfeeder_q_du;
                du_accum -= sig_chi * (1.0 - 1.0 / rho) * y * dfeeder_q_du;
            } else {
                du_accum += y * dfeeder_q_du;
            }
        }

        // rho-mediated terms; drho/df for pattern p needs its own dyt
        if (any_feeder && rho > 0.0) {
            double rho_term = sum_schi_fd / (rho * rho);
            double wait_pull = 2.0 * lam0 * (u - wfit) * dwfit_drho;
            for (std::size_t p = 0; p < P; ++p) {
                double drho_df = dyt_df[ix.f(p, k)] * wsum[p] / (R * s_eff);
                grad[ix.f(p, k)] += (-rho_term + wait_pull) * drho_df;
            }
            grad[ix.s(k)] += (-rho_term + wait_pull) * drho_ds;
            du_accum += (-rho_term + wait_pull) * drho_du;
        }

        out.value -= lam0 * (u - U) * (u - U);
        out.value -= lam0 * (u - wfit) * (u - wfit);
        du_accum -= 2.0 * lam0 * (u - U);
        du_accum -= 2.0 * lam0 * (u - wfit);
        grad[ix.u(k)] += du_accum;
    }

    return out;
}

namespace {

struct PenalizedObjective {
    const ReferenceState& ref;
    const Scenario& sc;
    const Flat& ix;
    double mu = 0.0;

    double budget_violation(const std::vector<double>& v) const {
        return std::max(0.0, solution_cost(v, ix, sc) / sc.budget.daily_budget - 1.0);
    }

    double value(const std::vector<double>& v) const {
        double viol = budget_violation(v);
        return sub_objective(unflatten(v, ix), ref, sc).value - mu * viol * viol;
    }

    double value_grad(const std::vector<double>& v, std::vector<double>& grad) const {
        SubObjective so = sub_objective(unflatten(v, ix), ref, sc);
        grad = std::move(so.gradient);
        double viol = budget_violation(v);
        if (viol > 0.0) {
            double c = 2.0 * mu * viol / sc.budget.daily_budget;
            for (std::size_t k = 0; k < ix.K; ++k) {
                double dk = sc.periods[k].duration_h;
                for (std::size_t p = 0; p < ix.P; ++p)
                    grad[ix.f(p, k)] -= c * dk *
                                        sc.modes[sc.patterns[p].mode].unit_op_cost *
                                        sc.patterns[p].cycle_time_h;
                grad[ix.s(k)] -= c * dk * sc.sams.unit_op_cost;
            }
        }
        return so.value - mu * viol * viol;
    }
};

void project(std::vector<double>& v, const SubBoxes& b) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], b.lo[i], b.hi[i]);
}

// Projected gradient ascent with Armijo backtracking; the accepted step
// warm-starts the next line search. Returns final value.
double ascend(std::vector<double>& x, const PenalizedObjective& obj, const SubBoxes& b) {
    double max_width = 0.0;
    for (std::size_t i = 0; i < b.lo.size(); ++i)
        max_width = std::max(max_width, b.hi[i] - b.lo[i]);

    std::vector<double> grad, cand;
    double val = obj.value_grad(x, grad);
    double t_prev = -1.0;
    for (int it = 0; it < kMaxPgIters; ++it) {
        double gmax = 0.0;
        for (double gi : grad) gmax = std::max(gmax, std::abs(gi));
        if (gmax < 1e-14) break;
        double t_cap = 0.25 * max_width / gmax;
        double t = t_prev > 0.0 ? std::min(4.0 * t_prev, t_cap) : t_cap;
        bool improved = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
            cand = x;
            for (std::size_t i = 0; i < x.size(); ++i) cand[i] += t * grad[i];
            project(cand, b);
            double dir = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dir += grad[i] * (cand[i] - x[i]);
            if (dir <= 0.0) continue;  // projection annihilated the step
            double cval = obj.value(cand);
            if (cval >= val + 1e-4 * dir) {
                double gain = cval - val;
                x = cand;
                val = obj.value_grad(x, grad);
                t_prev = t;
                improved = gain > 1e-8 * (1.0 + std::abs(val));
                break;
            }
        }
        if (!improved) break;
    }
    return val;
}

}  // namespace

Solution solve_local(const ReferenceState& ref, const Scenario& sc,
                     const SubSolution& start, std::uint64_t seed) {
    Flat ix{sc.patterns.size(), sc.periods.size()};
    SubBoxes boxes = sub_boxes(ref, sc);
    std::vector<double> x0 = flatten(start, ix);
    project(x0, boxes);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = sc.solver.nlp.perturb_sigma_frac;

    PenalizedObjective obj{ref, sc, ix, 0.0};
    const double mu0 = 100.0 * (1.0 + std::abs(sub_objective(start, ref, sc).value));

    bool have_best = false;
    double best_val = -kInf;
    std::vector<double> best_x = x0;

    for (int ms = 0; ms < sc.solver.nlp.multistart_count; ++ms) {
        std::vector<double> x = x0;
        if (ms > 0) {
            for (double& xi : x) xi *= 1.0 + sigma * normal(rng);
            project(x, boxes);
        }
        obj.mu = mu0;
        double viol = obj.budget_violation(x);
        for (int esc = 0; esc <= kMaxPenaltyEscalations; ++esc) {
            ascend(x, obj, boxes);
            viol = obj.budget_violation(x);
            if (viol <= kBudgetTol) break;
            obj.mu *= 10.0;
        }
        if (viol > kBudgetTol) continue;  // infeasible finisher
        double val = sub_objective(unflatten(x, ix), ref, sc).value;
        if (!have_best || val > best_val) {
            have_best = true;
            best_val = val;
            best_x = x;
        }
    }

    SubSolution sub = unflatten(best_x, ix);
    Solution out;
    out.freq_per_h = std::move(sub.freq);
    out.fleet = std::move(sub.fleet);
    return repair(std::move(out), sc);
}

}  // namespace freqfleet
