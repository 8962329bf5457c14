#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qgraph/errors.hpp"

namespace qgraph {

enum class Statistics { Distinguishable, Bosonic };

struct Edge {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
};

/// One endpoint slot of an edge: side 0 is the x=0 end ("from"),
/// side 1 the x=l_e end ("to"). Slot index = 2*edge + side.
struct EndpointRef {
    int edge = -1;
    int side = 0;
};

inline int slot_index(int edge, int side) { return 2 * edge + side; }

/// Compact metric graph: vertices plus edges identified with intervals [0, l_e].
/// Loop edges and multi-edges are permitted. Immutable after construction.
class MetricGraph {
public:
    MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges);

    int num_vertices() const { return static_cast<int>(vertex_ids_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_.at(e); }

    /// -1 if the id is unknown.
    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    int from_vertex(int e) const { return edge_from_.at(e); }
    int to_vertex(int e) const { return edge_to_.at(e); }
    /// Vertex at endpoint `side` of edge `e`.
    int endpoint_vertex(int e, int side) const { return side == 0 ? edge_from_.at(e) : edge_to_.at(e); }

    /// Loops count twice.
    int degree(int v) const { return static_cast<int>(incident_.at(v).size()); }
    const std::vector<EndpointRef>& incident(int v) const { return incident_.at(v); }

    bool is_connected() const;

private:
    std::vector<std::string> vertex_ids_;
    std::vector<Edge> edges_;
    std::vector<int> edge_from_, edge_to_;
    std::vector<std::vector<EndpointRef>> incident_;
    std::unordered_map<std::string, int> vertex_lookup_, edge_lookup_;
};

double total_length(const MetricGraph& g);

}  // namespace qgraph
