#include "freqfleet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

namespace freqfleet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::AccessWalk: return "access_walk";
        case EdgeKind::AccessFeeder: return "access_feeder";
        case EdgeKind::Transit: return "transit";
        case EdgeKind::Transfer: return "transfer";
    }
    return "?";
}

}  // namespace

MultimodalGraph build_graph(const Scenario& sc) {
    MultimodalGraph g;
    g.num_zones = static_cast<int>(sc.zones.size());

    // zone nodes first, then one node per (pattern, stop position)
    std::vector<int> pattern_node_base(sc.patterns.size(), 0);
    int next = g.num_zones;
    for (std::size_t p = 0; p < sc.patterns.size(); ++p) {
        pattern_node_base[p] = next;
        next += static_cast<int>(sc.patterns[p].stop_sequence.size());
    }
    g.num_nodes = next;
    g.node_pattern.assign(g.num_nodes, kNoPattern);
    g.node_stop.assign(g.num_nodes, -1);
    for (std::size_t p = 0; p < sc.patterns.size(); ++p)
        for (std::size_t s = 0; s < sc.patterns[p].stop_sequence.size(); ++s) {
            int n = pattern_node_base[p] + static_cast<int>(s);
            g.node_pattern[n] = static_cast<int>(p);
            g.node_stop[n] = sc.patterns[p].stop_sequence[s];
        }

    g.pattern_transit_edges.assign(sc.patterns.size(), {});
    g.pattern_feeder_edges.assign(sc.patterns.size(), {});
    g.zone_unconnected.assign(sc.zones.size(), 0);

    auto nodes_at_stop = [&](int stop, int exclude_pattern) {
        std::vector<int> out;
        for (int n = g.num_zones; n < g.num_nodes; ++n)
            if (g.node_stop[n] == stop && g.node_pattern[n] != exclude_pattern)
                out.push_back(n);
        return out;
    };

    auto add_edge = [&](Edge e) {
        g.edges.push_back(e);
        return static_cast<int>(g.edges.size()) - 1;
    };

    for (std::size_t zi = 0; zi < sc.zones.size(); ++zi) {
        const Zone& z = sc.zones[zi];
        if (z.unconnected()) {
            g.zone_unconnected[zi] = 1;
            continue;
        }
        int zn = static_cast<int>(zi);
        for (const auto& a : z.walk_access) {
            auto nodes = nodes_at_stop(a.stop, kNoPattern);
            if (nodes.empty())
                throw std::invalid_argument("walk access references stop " +
                                            std::to_string(a.stop) + " served by no pattern");
            for (int n : nodes) {
                double c = a.walk_time_min * sc.choice.walk_factor;
                add_edge({zn, n, EdgeKind::AccessWalk, c, a.walk_time_min, 0.0,
                          g.node_pattern[n], g.node_pattern[n]});
                add_edge({n, zn, EdgeKind::AccessWalk, c, a.walk_time_min, 0.0,
                          kNoPattern, g.node_pattern[n]});
            }
        }
        for (const auto& a : z.feeder_access) {
            auto nodes = nodes_at_stop(a.stop, kNoPattern);
            if (nodes.empty())
                throw std::invalid_argument("feeder access references stop " +
                                            std::to_string(a.stop) + " served by no pattern");
            for (int n : nodes) {
                int in = add_edge({zn, n, EdgeKind::AccessFeeder, a.ride_time_min,
                                   a.ride_time_min, a.ride_time_min, g.node_pattern[n],
                                   g.node_pattern[n]});
                int out = add_edge({n, zn, EdgeKind::AccessFeeder, a.ride_time_min,
                                    a.ride_time_min, a.ride_time_min, kNoPattern,
                                    g.node_pattern[n]});
                g.pattern_feeder_edges[g.node_pattern[n]].push_back(in);
                g.pattern_feeder_edges[g.node_pattern[n]].push_back(out);
            }
        }
    }

    for (std::size_t p = 0; p < sc.patterns.size(); ++p) {
        const Pattern& pat = sc.patterns[p];
        for (std::size_t s = 0; s + 1 < pat.stop_sequence.size(); ++s) {
            int a = pattern_node_base[p] + static_cast<int>(s);
            int b = a + 1;
            double t = pat.segment_times_min[s];
            int e = add_edge({a, b, EdgeKind::Transit, t, t, 0.0, kNoPattern,
                              static_cast<int>(p)});
            g.pattern_transit_edges[p].push_back(e);
        }
    }

    for (int n = g.num_zones; n < g.num_nodes; ++n) {
        for (int m : nodes_at_stop(g.node_stop[n], g.node_pattern[n])) {
            add_edge({n, m, EdgeKind::Transfer, sc.choice.transfer_penalty_min, 0.0, 0.0,
                      g.node_pattern[m], g.node_pattern[m]});
        }
    }

    g.out_edges.assign(g.num_nodes, {});
    g.in_edges.assign(g.num_nodes, {});
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        g.out_edges[g.edges[e].src].push_back(static_cast<int>(e));
        g.in_edges[g.edges[e].dst].push_back(static_cast<int>(e));
    }
    return g;
}

void update_costs(const MultimodalGraph& g, const Scenario& sc,
                  const std::vector<std::vector<double>>& freq_per_h, double wait_min,
                  int k, CostOverlay& out) {
    out.period = k;
    out.cost_min.resize(g.edges.size());
    out.time_min.resize(g.edges.size());
    const double gw = sc.choice.wait_factor;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const Edge& ed = g.edges[e];
        double cost = ed.static_cost_min;
        double time = ed.static_time_min;
        if (ed.kind == EdgeKind::AccessFeeder) {
            cost += gw * wait_min;
            time += wait_min;
        }
        if (ed.boarding_pattern != kNoPattern) {
            double f = freq_per_h[ed.boarding_pattern][k];
            if (f < kMinActiveFrequency) {
                cost = kInf;
                time = kInf;
            } else {
                double headway_wait = 60.0 / (2.0 * f);
                cost += gw * headway_wait;
                time += headway_wait;
            }
        }
        out.cost_min[e] = cost;
        out.time_min[e] = time;
    }
}

ReverseCosts reverse_costs(const MultimodalGraph& g, const CostOverlay& ov, int dest_zone) {
    ReverseCosts rc;
    rc.dest_zone = dest_zone;
    rc.dist_min.assign(g.num_nodes, kInf);
    rc.dist_min[dest_zone] = 0.0;

    using Item = std::pair<double, int>;  // (dist, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, dest_zone});
    std::vector<char> done(g.num_nodes, 0);

    while (!heap.empty()) {
        auto [d, n] = heap.top();
        heap.pop();
        if (done[n]) continue;
        done[n] = 1;
        // Zone nodes other than the destination are endpoints only: paths may
        // not route through an intermediate zone.
        if (n < g.num_zones && n != dest_zone) continue;
        for (int ei : g.in_edges[n]) {
            const Edge& e = g.edges[ei];
            double c = ov.cost_min[ei];
            if (!(c < kInf)) continue;
            double nd = d + c;
            if (nd < rc.dist_min[e.src]) {
                rc.dist_min[e.src] = nd;
                heap.push({nd, e.src});
            }
        }
    }
    return rc;
}

PathResult extract_path(const MultimodalGraph& g, const CostOverlay& ov,
                        const ReverseCosts& rc, int origin_zone) {
    PathResult pr;
    double total = rc.dist_min[origin_zone];
    if (!(total < kInf)) return pr;  // unreachable: all fields zero/empty

    pr.reachable = true;
    pr.generalized_cost_min = total;

    int cur = origin_zone;
    double remaining = total;
    int guard = g.num_nodes + 2;
    std::vector<char> pattern_seen(g.pattern_transit_edges.size(), 0);

    while (cur != rc.dest_zone && guard-- > 0) {
        int chosen = -1;
        int chosen_dst = -1;
        for (int ei : g.out_edges[cur]) {
            const Edge& e = g.edges[ei];
            if (e.dst < g.num_zones && e.dst != rc.dest_zone) continue;
            double c = ov.cost_min[ei];
            if (!(c < kInf) || !(rc.dist_min[e.dst] < kInf)) continue;
            double tol = 1e-9 * (1.0 + std::abs(remaining));
            if (c + rc.dist_min[e.dst] <= remaining + tol) {
                // smallest next node id wins; among parallel edges, lowest id
                if (chosen == -1 || e.dst < chosen_dst) {
                    chosen = ei;
                    chosen_dst = e.dst;
                }
            }
        }
        if (chosen == -1) throw std::logic_error("path extraction lost the shortest path");
        const Edge& e = g.edges[chosen];
        pr.links_used.push_back(chosen);
        pr.journey_time_min += ov.time_min[chosen];
        if (e.kind == EdgeKind::AccessFeeder) {
            ++pr.feeder_link_count;
            pr.feeder_time_min += e.feeder_ride_min;
        }
        int pat = e.assoc_pattern;
        if (pat != kNoPattern && !pattern_seen[pat]) {
            pattern_seen[pat] = 1;
            pr.patterns_used.push_back(pat);
        }
        remaining -= ov.cost_min[chosen];
        cur = e.dst;
    }
    if (cur != rc.dest_zone) throw std::logic_error("path extraction did not terminate");
    std::sort(pr.patterns_used.begin(), pr.patterns_used.end());
    return pr;
}

PathResult shortest_path(const MultimodalGraph& g, const CostOverlay& ov, int origin_zone,
                         int dest_zone) {
    return extract_path(g, ov, reverse_costs(g, ov, dest_zone), origin_zone);
}

LinkFlows assign_flows(const MultimodalGraph& g, const Scenario& sc,
                       const std::vector<double>& transit_demand_per_entry,
                       const std::vector<PathResult>& path_per_entry) {
    const std::size_t K = sc.periods.size();
    const std::size_t P = sc.patterns.size();
    LinkFlows lf;
    lf.flow_per_h.assign(K, std::vector<double>(g.edges.size(), 0.0));
    lf.pattern_peak.assign(P, std::vector<double>(K, 0.0));
    lf.pattern_feeder_flow.assign(P, std::vector<double>(K, 0.0));
    lf.feeder_time_pax.assign(K, 0.0);

    for (std::size_t i = 0; i < sc.demand.size(); ++i) {
        double q = transit_demand_per_entry[i];
        if (q <= 0.0 || !path_per_entry[i].reachable) continue;
        int k = sc.demand[i].period;
        for (int ei : path_per_entry[i].links_used) lf.flow_per_h[k][ei] += q;
    }

    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t k = 0; k < K; ++k) {
            double peak = 0.0;
            for (int ei : g.pattern_transit_edges[p])
                peak = std::max(peak, lf.flow_per_h[k][ei]);
            lf.pattern_peak[p][k] = peak;
            double ff = 0.0;
            for (int ei : g.pattern_feeder_edges[p]) {
                double q = lf.flow_per_h[k][ei];
                ff += q;
                lf.feeder_time_pax[k] += q * g.edges[ei].feeder_ride_min / 60.0;
            }
            lf.pattern_feeder_flow[p][k] = ff;
        }
    return lf;
}

void dump_graph_csv(const MultimodalGraph& g, const std::string& path) {
    std::ofstream out(path);
    out << "src,dst,kind,static_cost,pattern\n";
    for (const Edge& e : g.edges)
        out << e.src << "," << e.dst << "," << kind_name(e.kind) << "," << e.static_cost_min
            << "," << e.assoc_pattern << "\n";
}

}  // namespace freqfleet
