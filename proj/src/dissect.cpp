#include "qgraph/dissect.hpp"

#include <algorithm>
#include <numeric>

namespace qgraph {

namespace {

/// Looks up the layout component carrying a facet trace. Bosonic layouts only
/// store exchange representatives; the fallback maps a facet to the component
/// of its exchange image ((e1,e2) y-faces -> (e2,e1) x-faces, minus-side
/// diagonals -> the single per-edge diagonal entry).
int find_component(const BoundaryLayout& lay, const std::vector<int>& edges, int cell,
                   LayoutComponent::Kind kind, int axis, int side) {
    auto matches = [&](const LayoutComponent& c, const std::vector<int>& ed, int ax, int sd) {
        return c.kind == kind && c.edges == ed && c.axis == ax && c.side == sd;
    };
    for (int i = 0; i < lay.dim(); ++i) {
        const LayoutComponent& c = lay.components[i];
        if (kind == LayoutComponent::Kind::Diagonal) {
            if (c.kind == kind && c.edges == edges &&
                (lay.particle_count != 2 ? c.cell == cell && c.axis == axis
                                         : c.side == side))
                return i;
        } else if (matches(c, edges, axis, side) &&
                   (lay.particle_count == 2 || c.cell == cell)) {
            return i;
        }
    }
    if (lay.statistics == Statistics::Bosonic && lay.particle_count == 2) {
        if (kind == LayoutComponent::Kind::Diagonal) {
            for (int i = 0; i < lay.dim(); ++i)
                if (lay.components[i].kind == kind && lay.components[i].edges == edges) return i;
        } else {
            const std::vector<int> swapped = {edges[1], edges[0]};
            for (int i = 0; i < lay.dim(); ++i)
                if (matches(lay.components[i], swapped, 1 - axis, side)) return i;
        }
    }
    if (lay.statistics == Statistics::Bosonic && lay.particle_count >= 3) {
        // One contact and two vertex components in total.
        if (kind == LayoutComponent::Kind::Diagonal) return 0;
        return lay.contact_dim + side;
    }
    throw Error(ErrorCode::ValidationError, "facet has no boundary-layout component");
}

}  // namespace

int DissectedDomain::cell_index(const std::vector<int>& edges, int ordering) const {
    for (int i = 0; i < static_cast<int>(cells.size()); ++i)
        if (cells[i].edges == edges && cells[i].ordering == ordering) return i;
    return -1;
}

DissectedDomain dissect(const MetricGraph& g, int particle_count, Statistics statistics) {
    if (particle_count < 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "dissection is defined for two or more particles");
    const int E = g.num_edges();
    if (particle_count >= 3 && E != 1)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "N >= 3 dissection requires a single edge");

    DissectedDomain dd;
    dd.particle_count = particle_count;
    dd.statistics = statistics;
    dd.layout = build_layout(g, particle_count, statistics);

    if (particle_count == 2) {
        for (int e1 = 0; e1 < E; ++e1)
            for (int e2 = 0; e2 < E; ++e2) {
                const double l1 = g.edge(e1).length, l2 = g.edge(e2).length;
                if (e1 == e2) {
                    for (int ord = 0; ord < 2; ++ord) {
                        Cell c;
                        c.kind = ord == 0 ? Cell::Kind::TrianglePlus : Cell::Kind::TriangleMinus;
                        c.edges = {e1, e1};
                        c.ordering = ord;
                        c.extents = {l1, l1};
                        c.measure = 0.5 * l1 * l1;
                        dd.cells.push_back(std::move(c));
                    }
                } else {
                    Cell c;
                    c.kind = Cell::Kind::Rectangle;
                    c.edges = {e1, e2};
                    c.extents = {l1, l2};
                    c.measure = l1 * l2;
                    dd.cells.push_back(std::move(c));
                }
            }

        auto add_face = [&](Cell& c, int axis, int side) {
            CellFacet f;
            f.tag = CellFacet::Tag::VertexFace;
            f.axis = axis;
            f.side = side;
            f.vertex = g.endpoint_vertex(c.edges[axis], side);
            f.component = find_component(dd.layout, c.edges, c.ordering,
                                         LayoutComponent::Kind::VertexFace, axis, side);
            c.facets.push_back(f);
        };
        for (Cell& c : dd.cells) {
            switch (c.kind) {
                case Cell::Kind::Rectangle:
                    add_face(c, 0, 0);
                    add_face(c, 0, 1);
                    add_face(c, 1, 0);
                    add_face(c, 1, 1);
                    break;
                case Cell::Kind::TrianglePlus:
                    add_face(c, 0, 1);
                    add_face(c, 1, 0);
                    break;
                case Cell::Kind::TriangleMinus:
                    add_face(c, 0, 0);
                    add_face(c, 1, 1);
                    break;
                default:
                    break;
            }
        }
        // Diagonal facet pairs between the two triangles of each square.
        for (int e = 0; e < E; ++e) {
            const int plus = dd.cell_index({e, e}, 0);
            const int minus = dd.cell_index({e, e}, 1);
            for (int side = 0; side < 2; ++side) {
                const int cell = side == 0 ? plus : minus;
                CellFacet f;
                f.tag = CellFacet::Tag::Diagonal;
                f.side = side;
                f.component = find_component(dd.layout, {e, e}, side,
                                             LayoutComponent::Kind::Diagonal, 0, side);
                dd.cells[cell].facets.push_back(f);
            }
            const int pf = static_cast<int>(dd.cells[plus].facets.size()) - 1;
            const int mf = static_cast<int>(dd.cells[minus].facets.size()) - 1;
            dd.cells[plus].facets[pf].paired_cell = minus;
            dd.cells[plus].facets[pf].paired_facet = mf;
            dd.cells[minus].facets[mf].paired_cell = plus;
            dd.cells[minus].facets[mf].paired_facet = pf;
        }

        dd.exchange_cell.resize(dd.cells.size());
        for (int i = 0; i < static_cast<int>(dd.cells.size()); ++i) {
            const Cell& c = dd.cells[i];
            if (c.kind == Cell::Kind::Rectangle)
                dd.exchange_cell[i] = dd.cell_index({c.edges[1], c.edges[0]}, 0);
            else
                dd.exchange_cell[i] = dd.cell_index(c.edges, 1 - c.ordering);
        }
    } else {
        const int N = particle_count;
        const double l = g.edge(0).length;
        std::vector<int> p(N);
        std::iota(p.begin(), p.end(), 0);
        std::vector<std::vector<int>> perms;
        do {
            perms.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        double fact = 1.0;
        for (int i = 2; i <= N; ++i) fact *= i;

        for (int r = 0; r < static_cast<int>(perms.size()); ++r) {
            Cell c;
            c.kind = Cell::Kind::Simplex;
            c.edges.assign(N, 0);
            c.ordering = r;
            c.extents.assign(N, l);
            c.measure = std::pow(l, N) / fact;
            CellFacet f0;
            f0.tag = CellFacet::Tag::VertexFace;
            f0.axis = perms[r][0];
            f0.side = 0;
            f0.vertex = g.endpoint_vertex(0, 0);
            f0.component = find_component(dd.layout, c.edges, r,
                                          LayoutComponent::Kind::VertexFace, perms[r][0], 0);
            c.facets.push_back(f0);
            CellFacet f1;
            f1.tag = CellFacet::Tag::VertexFace;
            f1.axis = perms[r][N - 1];
            f1.side = 1;
            f1.vertex = g.endpoint_vertex(0, 1);
            f1.component = find_component(dd.layout, c.edges, r,
                                          LayoutComponent::Kind::VertexFace, perms[r][N - 1], 1);
            c.facets.push_back(f1);
            dd.cells.push_back(std::move(c));
        }
        for (int r = 0; r < static_cast<int>(perms.size()); ++r)
            for (int i = 0; i + 1 < N; ++i) {
                std::vector<int> tau = perms[r];
                std::swap(tau[i], tau[i + 1]);
                const int rt = static_cast<int>(
                    std::lower_bound(perms.begin(), perms.end(), tau) - perms.begin());
                if (r > rt) continue;
                for (int side = 0; side < 2; ++side) {
                    const int cell = side == 0 ? r : rt;
                    CellFacet f;
                    f.tag = CellFacet::Tag::Diagonal;
                    f.axis = i;
                    f.side = side;
                    f.component = find_component(dd.layout, dd.cells[cell].edges, cell,
                                                 LayoutComponent::Kind::Diagonal, i, side);
                    dd.cells[cell].facets.push_back(f);
                }
                const int fa = static_cast<int>(dd.cells[r].facets.size()) - 1;
                const int fb = static_cast<int>(dd.cells[rt].facets.size()) - 1;
                dd.cells[r].facets[fa].paired_cell = rt;
                dd.cells[r].facets[fa].paired_facet = fb;
                dd.cells[rt].facets[fb].paired_cell = r;
                dd.cells[rt].facets[fb].paired_facet = fa;
            }
    }

    dd.total_measure = 0.0;
    for (const Cell& c : dd.cells) dd.total_measure += c.measure;
    return dd;
}

DiagonalTrace diagonal_trace(const DissectedDomain& dd, int e) {
    if (dd.particle_count != 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "diagonal traces are defined on the two-particle domain");
    const int plus = dd.cell_index({e, e}, 0);
    const int minus = dd.cell_index({e, e}, 1);
    if (e < 0 || plus < 0 || minus < 0)
        throw Error(ErrorCode::NoDiagonal, "no diagonal for edge index " + std::to_string(e));
    DiagonalTrace tr;
    tr.edge = e;
    tr.length = dd.cells[plus].extents[0];
    tr.plus_cell = plus;
    tr.minus_cell = minus;
    for (int f = 0; f < static_cast<int>(dd.cells[plus].facets.size()); ++f)
        if (dd.cells[plus].facets[f].tag == CellFacet::Tag::Diagonal) {
            tr.plus_facet = f;
            tr.minus_facet = dd.cells[plus].facets[f].paired_facet;
        }
    if (tr.plus_facet < 0)
        throw Error(ErrorCode::NoDiagonal, "diagonal facet missing for edge " + std::to_string(e));
    return tr;
}

ExchangeMap exchange_map(const DissectedDomain& dd) {
    if (dd.particle_count != 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "the exchange map is defined for two particles");
    ExchangeMap ex;
    ex.cell_image = dd.exchange_cell;
    return ex;
}

}  // namespace qgraph
