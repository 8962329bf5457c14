#include "qgraph/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgraph {

namespace {

long count_nodes_2d(const DissectedDomain& dd, const std::vector<int>& sub) {
    long total = 0;
    for (const Cell& c : dd.cells) {
        const long n1 = sub[c.edges[0]], n2 = sub[c.edges[1]];
        if (c.kind == Cell::Kind::Rectangle)
            total += (n1 + 1) * (n2 + 1);
        else
            total += (n1 + 1) * (n1 + 2) / 2;
    }
    return total;
}

/// Local index of grid node (i, j) within a cell; nodes are enumerated in
/// lexicographic (i, j) order restricted to the cell's closure.
struct CellGrid {
    Cell::Kind kind;
    int n1 = 0, n2 = 0;
    int base = 0;

    int local(int i, int j) const {
        switch (kind) {
            case Cell::Kind::Rectangle:
                return i * (n2 + 1) + j;
            case Cell::Kind::TrianglePlus:  // closure of {j <= i}
                return i * (i + 1) / 2 + j;
            case Cell::Kind::TriangleMinus:  // closure of {i <= j}
                return i * (n1 + 1) - i * (i - 1) / 2 + (j - i);
            default:
                return -1;
        }
    }
    int id(int i, int j) const { return base + local(i, j); }
    bool contains(int i, int j) const {
        if (i < 0 || j < 0 || i > n1 || j > n2) return false;
        if (kind == Cell::Kind::TrianglePlus) return j <= i;
        if (kind == Cell::Kind::TriangleMinus) return i <= j;
        return true;
    }
    int count() const {
        return kind == Cell::Kind::Rectangle ? (n1 + 1) * (n2 + 1) : (n1 + 1) * (n1 + 2) / 2;
    }
};

void build_2d(const DissectedDomain& dd, Mesh& mesh) {
    const auto& sub = mesh.edge_subdiv;
    std::vector<CellGrid> grids(dd.cells.size());
    int next = 0;
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const Cell& c = dd.cells[ci];
        CellGrid& g = grids[ci];
        g.kind = c.kind;
        g.n1 = sub[c.edges[0]];
        g.n2 = c.kind == Cell::Kind::Rectangle ? sub[c.edges[1]] : g.n1;
        g.base = next;
        next += g.count();
    }
    mesh.coords.resize(next);
    mesh.node_cell.resize(next);
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const Cell& c = dd.cells[ci];
        const CellGrid& g = grids[ci];
        const double h1 = c.extents[0] / g.n1, h2 = c.extents[1] / g.n2;
        for (int i = 0; i <= g.n1; ++i)
            for (int j = 0; j <= g.n2; ++j) {
                if (!g.contains(i, j)) continue;
                const int id = g.id(i, j);
                mesh.coords[id] = {i * h1, j * h2, 0.0};
                mesh.node_cell[id] = static_cast<int>(ci);
            }
    }

    // Each grid square splits along its main diagonal; on squares this keeps
    // the cut diagonal a union of element edges.
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const Cell& c = dd.cells[ci];
        const CellGrid& g = grids[ci];
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j) {
                bool lower = true, upper = true;
                if (c.kind == Cell::Kind::TrianglePlus) {
                    lower = j <= i;
                    upper = j < i;
                } else if (c.kind == Cell::Kind::TriangleMinus) {
                    lower = j > i;
                    upper = j >= i;
                }
                if (lower)
                    mesh.elements.push_back(
                        {{g.id(i, j), g.id(i + 1, j), g.id(i + 1, j + 1), -1},
                         static_cast<int>(ci)});
                if (upper)
                    mesh.elements.push_back(
                        {{g.id(i, j), g.id(i + 1, j + 1), g.id(i, j + 1), -1},
                         static_cast<int>(ci)});
            }
    }

    mesh.component_nodes.assign(dd.layout.dim(), {});
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const Cell& c = dd.cells[ci];
        const CellGrid& g = grids[ci];
        for (const CellFacet& f : c.facets) {
            std::vector<int>& chain = mesh.component_nodes[f.component];
            if (f.tag == CellFacet::Tag::Diagonal) {
                for (int i = 0; i <= g.n1; ++i) chain.push_back(g.id(i, i));
            } else if (f.axis == 0) {
                const int i = f.side == 0 ? 0 : g.n1;
                for (int j = 0; j <= g.n2; ++j)
                    if (g.contains(i, j)) chain.push_back(g.id(i, j));
            } else {
                const int j = f.side == 0 ? 0 : g.n2;
                for (int i = 0; i <= g.n1; ++i)
                    if (g.contains(i, j)) chain.push_back(g.id(i, j));
            }
        }
    }

    // Exchange group {identity, swap}; the swap sends a node copy in a cell to
    // the mirrored copy in the exchange-image cell.
    mesh.symmetry_nodes.assign(2, std::vector<int>(mesh.num_nodes()));
    std::iota(mesh.symmetry_nodes[0].begin(), mesh.symmetry_nodes[0].end(), 0);
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const CellGrid& g = grids[ci];
        const CellGrid& gi = grids[dd.exchange_cell[ci]];
        for (int i = 0; i <= g.n1; ++i)
            for (int j = 0; j <= g.n2; ++j) {
                if (!g.contains(i, j)) continue;
                mesh.symmetry_nodes[1][g.id(i, j)] = gi.id(j, i);
            }
    }
}

void build_3d(const DissectedDomain& dd, Mesh& mesh, long node_cap) {
    const int N = dd.particle_count;
    const int n = mesh.edge_subdiv[0];
    const double hh = mesh.edge_length[0] / n;
    const int stride = n + 1;
    if (static_cast<long>(stride) * stride * stride > node_cap)
        throw Error(ErrorCode::MeshTooFine,
                    "mesh would exceed the node cap of " + std::to_string(node_cap));

    std::vector<int> p(N);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    const int ncells = static_cast<int>(perms.size());

    auto in_cell = [&](const std::vector<int>& sigma, int a, int b, int c) {
        const int x[3] = {a, b, c};
        for (int i = 0; i + 1 < N; ++i)
            if (x[sigma[i]] > x[sigma[i + 1]]) return false;
        return true;
    };

    // Per-cell dense lookup grid index -> node id.
    std::vector<std::vector<int>> lookup(ncells,
                                         std::vector<int>(stride * stride * stride, -1));
    auto flat = [&](int a, int b, int c) { return (a * stride + b) * stride + c; };
    int next = 0;
    for (int r = 0; r < ncells; ++r)
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                for (int c = 0; c <= n; ++c) {
                    if (!in_cell(perms[r], a, b, c)) continue;
                    lookup[r][flat(a, b, c)] = next++;
                    if (next > node_cap)
                        throw Error(ErrorCode::MeshTooFine,
                                    "mesh would exceed the node cap of " +
                                        std::to_string(node_cap));
                }
    mesh.coords.resize(next);
    mesh.node_cell.resize(next);
    for (int r = 0; r < ncells; ++r)
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                for (int c = 0; c <= n; ++c) {
                    const int id = lookup[r][flat(a, b, c)];
                    if (id < 0) continue;
                    mesh.coords[id] = {a * hh, b * hh, c * hh};
                    mesh.node_cell[id] = r;
                }

    // Kuhn subdivision: each grid cube splits into 6 tetrahedra along its main
    // diagonal; every tetrahedron lies inside exactly one order-simplex cell.
    const int axes[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (const auto& ax : axes) {
                    int v[4][3] = {{a, b, c}, {a, b, c}, {a, b, c}, {a, b, c}};
                    for (int k = 1; k < 4; ++k) {
                        for (int d = 0; d < 3; ++d) v[k][d] = v[k - 1][d];
                        v[k][ax[k - 1]] += 1;
                    }
                    // Ordering of the centroid coordinates selects the cell.
                    double cen[3] = {0, 0, 0};
                    for (int k = 0; k < 4; ++k)
                        for (int d = 0; d < 3; ++d) cen[d] += 0.25 * v[k][d];
                    std::vector<int> sigma = {0, 1, 2};
                    std::sort(sigma.begin(), sigma.end(),
                              [&](int x, int y) { return cen[x] < cen[y]; });
                    const int r = static_cast<int>(
                        std::lower_bound(perms.begin(), perms.end(), sigma) - perms.begin());
                    MeshElement el;
                    el.cell = r;
                    for (int k = 0; k < 4; ++k)
                        el.nodes[k] = lookup[r][flat(v[k][0], v[k][1], v[k][2])];
                    mesh.elements.push_back(el);
                }

    mesh.component_nodes.assign(dd.layout.dim(), {});
    for (size_t ci = 0; ci < dd.cells.size(); ++ci) {
        const Cell& c = dd.cells[ci];
        const std::vector<int>& sigma = perms[c.ordering];
        for (const CellFacet& f : c.facets) {
            std::vector<int>& nodes = mesh.component_nodes[f.component];
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b)
                    for (int cc = 0; cc <= n; ++cc) {
                        const int id = lookup[ci][flat(a, b, cc)];
                        if (id < 0) continue;
                        const int x[3] = {a, b, cc};
                        bool on = false;
                        if (f.tag == CellFacet::Tag::VertexFace)
                            on = x[f.axis] == (f.side == 0 ? 0 : n);
                        else
                            on = x[sigma[f.axis]] == x[sigma[f.axis + 1]];
                        if (on) nodes.push_back(id);
                    }
        }
    }

    mesh.symmetry_nodes.assign(ncells, std::vector<int>(mesh.num_nodes(), -1));
    for (int gr = 0; gr < ncells; ++gr) {
        const std::vector<int>& pi = perms[gr];
        for (int r = 0; r < ncells; ++r) {
            // Image cell of the region x_{sigma(0)} < ... under x_d -> x_{pi(d)}.
            std::vector<int> image(N);
            for (int i = 0; i < N; ++i) image[i] = pi[perms[r][i]];
            const int ri = static_cast<int>(
                std::lower_bound(perms.begin(), perms.end(), image) - perms.begin());
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b)
                    for (int c = 0; c <= n; ++c) {
                        const int id = lookup[r][flat(a, b, c)];
                        if (id < 0) continue;
                        const int x[3] = {a, b, c};
                        int y[3];
                        for (int d = 0; d < 3; ++d) y[pi[d]] = x[d];
                        mesh.symmetry_nodes[gr][id] = lookup[ri][flat(y[0], y[1], y[2])];
                    }
        }
    }
}

}  // namespace

int subdivisions_for(double length, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::InvalidH, "mesh parameter h must be positive and finite");
    return std::max(1, static_cast<int>(std::ceil(length / h * (1.0 - 1e-12))));
}

Mesh build_mesh(const DissectedDomain& dd, double h, long node_cap) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::InvalidH, "mesh parameter h must be positive and finite");
    if (dd.statistics != Statistics::Distinguishable)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "meshing uses the distinguishable dissection; exchange symmetry is "
                    "applied spectrally");
    Mesh mesh;
    mesh.dim = dd.particle_count;
    mesh.h = h;

    int max_edge = 0;
    for (const Cell& c : dd.cells)
        for (int e : c.edges) max_edge = std::max(max_edge, e);
    mesh.edge_length.assign(max_edge + 1, 0.0);
    for (const Cell& c : dd.cells)
        for (size_t k = 0; k < c.edges.size(); ++k) mesh.edge_length[c.edges[k]] = c.extents[k];
    mesh.edge_subdiv.resize(mesh.edge_length.size());
    for (size_t e = 0; e < mesh.edge_length.size(); ++e)
        mesh.edge_subdiv[e] = subdivisions_for(mesh.edge_length[e], h);

    if (dd.particle_count == 2) {
        if (count_nodes_2d(dd, mesh.edge_subdiv) > node_cap)
            throw Error(ErrorCode::MeshTooFine,
                        "mesh would exceed the node cap of " + std::to_string(node_cap));
        build_2d(dd, mesh);
    } else if (dd.particle_count == 3) {
        build_3d(dd, mesh, node_cap);
    } else {
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "meshing supports two or three particles");
    }
    return mesh;
}

}  // namespace qgraph
