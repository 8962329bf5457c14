#include "qgraph/graph.hpp"

#include <cmath>
#include <queue>

namespace qgraph {

MetricGraph::MetricGraph(std::vector<std::string> vertex_ids, std::vector<Edge> edges)
    : vertex_ids_(std::move(vertex_ids)), edges_(std::move(edges)) {
    if (vertex_ids_.empty())
        throw Error(ErrorCode::ValidationError, "graph has no vertices");
    for (int v = 0; v < static_cast<int>(vertex_ids_.size()); ++v) {
        if (vertex_ids_[v].empty())
            throw Error(ErrorCode::ValidationError, "empty vertex id");
        if (!vertex_lookup_.emplace(vertex_ids_[v], v).second)
            throw Error(ErrorCode::ValidationError, "duplicate vertex id '" + vertex_ids_[v] + "'");
    }
    if (edges_.empty())
        throw Error(ErrorCode::ValidationError, "graph has no edges (total length would be zero)");
    incident_.resize(vertex_ids_.size());
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        const Edge& ed = edges_[e];
        if (ed.id.empty())
            throw Error(ErrorCode::ValidationError, "empty edge id");
        if (!edge_lookup_.emplace(ed.id, e).second)
            throw Error(ErrorCode::ValidationError, "duplicate edge id '" + ed.id + "'");
        if (!(ed.length > 0.0) || !std::isfinite(ed.length))
            throw Error(ErrorCode::ValidationError,
                        "edge '" + ed.id + "' has nonpositive or non-finite length");
        auto from_it = vertex_lookup_.find(ed.from);
        auto to_it = vertex_lookup_.find(ed.to);
        if (from_it == vertex_lookup_.end())
            throw Error(ErrorCode::ValidationError,
                        "edge '" + ed.id + "' references unknown vertex '" + ed.from + "'");
        if (to_it == vertex_lookup_.end())
            throw Error(ErrorCode::ValidationError,
                        "edge '" + ed.id + "' references unknown vertex '" + ed.to + "'");
        edge_from_.push_back(from_it->second);
        edge_to_.push_back(to_it->second);
        incident_[from_it->second].push_back({e, 0});
        incident_[to_it->second].push_back({e, 1});
    }
}

int MetricGraph::vertex_index(const std::string& id) const {
    auto it = vertex_lookup_.find(id);
    return it == vertex_lookup_.end() ? -1 : it->second;
}

int MetricGraph::edge_index(const std::string& id) const {
    auto it = edge_lookup_.find(id);
    return it == edge_lookup_.end() ? -1 : it->second;
}

bool MetricGraph::is_connected() const {
    std::vector<char> seen(vertex_ids_.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    while (!frontier.empty()) {
        int v = frontier.front();
        frontier.pop();
        for (const EndpointRef& ref : incident_[v]) {
            int w = ref.side == 0 ? edge_to_[ref.edge] : edge_from_[ref.edge];
            if (!seen[w]) {
                seen[w] = 1;
                frontier.push(w);
            }
        }
    }
    for (char s : seen)
        if (!s) return false;
    return true;
}

double total_length(const MetricGraph& g) {
    double sum = 0.0;
    for (const Edge& e : g.edges()) sum += e.length;
    return sum;
}

}  // namespace qgraph
