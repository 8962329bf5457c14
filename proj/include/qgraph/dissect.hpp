#pragma once

#include <array>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

struct CellFacet {
    enum class Tag { VertexFace, Diagonal };
    Tag tag = Tag::VertexFace;
    int axis = 0;          // see LayoutComponent
    int side = 0;
    int vertex = -1;       // VertexFace only
    int component = -1;    // boundary-layout component carrying this facet's trace
    int paired_cell = -1;  // Diagonal: the facet on the other side of the plane
    int paired_facet = -1;
};

struct Cell {
    enum class Kind { Rectangle, TrianglePlus, TriangleMinus, Simplex };
    Kind kind = Kind::Rectangle;
    std::vector<int> edges;       // particle -> edge
    int ordering = 0;             // squares: 0 = plus, 1 = minus; N>=3: lex rank
    std::vector<double> extents;  // edge lengths per particle coordinate
    double measure = 0.0;
    std::vector<CellFacet> facets;
};

struct DissectedDomain {
    int particle_count = 2;
    Statistics statistics = Statistics::Distinguishable;
    BoundaryLayout layout;
    std::vector<Cell> cells;
    double total_measure = 0.0;
    std::vector<int> exchange_cell;  // N=2: cell -> its image under (x,y) -> (y,x)

    int cell_index(const std::vector<int>& edges, int ordering) const;
};

DissectedDomain dissect(const MetricGraph& g, int particle_count, Statistics statistics);

/// Matched pair of diagonal facets of the square of edge e, parameterized by
/// t -> (t, t), t in (0, l_e); the inward normal derivative convention is
/// +-(psi_x - psi_y)/sqrt(2) on the plus/minus side.
struct DiagonalTrace {
    int edge = 0;
    double length = 0.0;
    int plus_cell = -1, plus_facet = -1;
    int minus_cell = -1, minus_facet = -1;
};

DiagonalTrace diagonal_trace(const DissectedDomain& dd, int e);

/// The two-particle exchange involution (x, y) -> (y, x).
struct ExchangeMap {
    std::vector<int> cell_image;
    static std::array<double, 2> point_image(double x, double y) { return {y, x}; }
};

ExchangeMap exchange_map(const DissectedDomain& dd);

}  // namespace qgraph
