#pragma once

#include <string>
#include <vector>

#include "freqfleet/scenario.hpp"

namespace freqfleet {

// Frequencies below this remove the pattern from the graph: its entry edges
// get infinite cost, so no demand can board.
inline constexpr double kMinActiveFrequency = 0.1;  // vehicles/h

inline constexpr int kNoPattern = -1;

enum class EdgeKind { AccessWalk, AccessFeeder, Transit, Transfer };

struct Edge {
    int src = 0;
    int dst = 0;
    EdgeKind kind = EdgeKind::Transit;
    double static_cost_min = 0.0;   // weighted routing cost component
    double static_time_min = 0.0;   // unweighted clock-time component
    double feeder_ride_min = 0.0;   // feeder in-vehicle time, 0 unless AccessFeeder
    int boarding_pattern = kNoPattern;  // pattern entered through this edge
    int assoc_pattern = kNoPattern;     // pattern of the transit endpoint
};

// Directed routing graph: one node per zone plus one node per (pattern,
// stop position). Topology is immutable after build; per-period costs live
// in CostOverlay buffers owned by each evaluation.
struct MultimodalGraph {
    int num_zones = 0;
    int num_nodes = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out_edges;  // per node, edge indices
    std::vector<std::vector<int>> in_edges;
    std::vector<int> node_pattern;            // kNoPattern for zone nodes
    std::vector<int> node_stop;               // stop id, -1 for zone nodes
    std::vector<std::vector<int>> pattern_transit_edges;  // per pattern
    std::vector<std::vector<int>> pattern_feeder_edges;   // per pattern, both directions
    std::vector<char> zone_unconnected;       // per zone
};

MultimodalGraph build_graph(const Scenario& sc);

// Edge costs for one period. Each evaluation owns its overlay, so
// evaluations can run concurrently over a shared graph.
struct CostOverlay {
    int period = -1;
    std::vector<double> cost_min;  // weighted
    std::vector<double> time_min;  // unweighted
};

// Fills `out` with the costs of period `k` given pattern frequencies and the
// period's feeder wait. Boarding an active pattern costs wait_factor times
// half its headway; every feeder leg additionally waits wait_factor * wait_min.
void update_costs(const MultimodalGraph& g, const Scenario& sc,
                  const std::vector<std::vector<double>>& freq_per_h,
                  double wait_min, int k, CostOverlay& out);

struct PathResult {
    double generalized_cost_min = 0.0;
    double journey_time_min = 0.0;
    std::vector<int> patterns_used;
    std::vector<int> links_used;       // edge indices in path order
    int feeder_link_count = 0;         // 0, 1 or 2
    double feeder_time_min = 0.0;
    bool reachable = false;
};

// Cost-to-destination potentials from a backward search; shared by every
// origin querying the same destination under one overlay.
struct ReverseCosts {
    int dest_zone = -1;
    std::vector<double> dist_min;  // per node, +inf if the node cannot reach dest
};

ReverseCosts reverse_costs(const MultimodalGraph& g, const CostOverlay& ov,
                           int dest_zone);

// Lexicographically smallest (by node-id sequence) minimum-cost path.
// Paths never pass through intermediate zone nodes.
PathResult extract_path(const MultimodalGraph& g, const CostOverlay& ov,
                        const ReverseCosts& rc, int origin_zone);

PathResult shortest_path(const MultimodalGraph& g, const CostOverlay& ov,
                         int origin_zone, int dest_zone);

struct LinkFlows {
    std::vector<std::vector<double>> flow_per_h;           // [period][edge]
    std::vector<std::vector<double>> pattern_peak;         // [pattern][period]
    std::vector<std::vector<double>> pattern_feeder_flow;  // [pattern][period]
    std::vector<double> feeder_time_pax;                   // [period], sum q*T in pax-h/h
};

// All-or-nothing loading of per-entry transit demand onto each entry's path.
LinkFlows assign_flows(const MultimodalGraph& g, const Scenario& sc,
                       const std::vector<double>& transit_demand_per_entry,
                       const std::vector<PathResult>& path_per_entry);

// Debug edge list: src,dst,kind,static_cost,pattern.
void dump_graph_csv(const MultimodalGraph& g, const std::string& path);

}  // namespace freqfleet
