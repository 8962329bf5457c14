#include "qgraph/assemble.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qgraph {

namespace {

using Triplet = Eigen::Triplet<double>;

int face_component(const BoundaryLayout& lay, const std::vector<int>& edges, int axis,
                   int side) {
    for (int a = lay.contact_dim; a < lay.dim(); ++a) {
        const LayoutComponent& c = lay.components[a];
        if (c.kind == LayoutComponent::Kind::VertexFace && c.axis == axis && c.side == side &&
            c.edges == edges)
            return a;
    }
    throw Error(ErrorCode::DimensionMismatch, "no boundary component matches the requested face");
}

void element_triplets(const Mesh& mesh, double wx, double wy, double wz, size_t begin,
                      size_t end, std::vector<Triplet>& kg, std::vector<Triplet>& km) {
    if (mesh.dim == 2) {
        for (size_t idx = begin; idx < end; ++idx) {
            const MeshElement& el = mesh.elements[idx];
            const auto& p0 = mesh.coords[el.nodes[0]];
            const auto& p1 = mesh.coords[el.nodes[1]];
            const auto& p2 = mesh.coords[el.nodes[2]];
            const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
            const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
            const double area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) -
                                 (p2[0] - p0[0]) * (p1[1] - p0[1]);
            const double area = 0.5 * std::abs(area2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double k = (wx * b[i] * b[j] + wy * c[i] * c[j]) / (4.0 * area);
                    // Half consistent, half lumped: cancels the axial part of
                    // the dispersion error, matching the 1D treatment.
                    const double m = area / 24.0 * (i == j ? 6.0 : 1.0);
                    kg.emplace_back(el.nodes[i], el.nodes[j], k);
                    km.emplace_back(el.nodes[i], el.nodes[j], m);
                }
        }
    } else {
        for (size_t idx = begin; idx < end; ++idx) {
            const MeshElement& el = mesh.elements[idx];
            Eigen::Matrix3d J;
            const auto& p0 = mesh.coords[el.nodes[0]];
            for (int k = 1; k < 4; ++k)
                for (int d = 0; d < 3; ++d) J(d, k - 1) = mesh.coords[el.nodes[k]][d] - p0[d];
            const double vol = std::abs(J.determinant()) / 6.0;
            const Eigen::Matrix3d Jinv = J.inverse();
            Eigen::Matrix<double, 4, 3> grad;
            for (int k = 1; k < 4; ++k) grad.row(k) = Jinv.row(k - 1);
            grad.row(0) = -(grad.row(1) + grad.row(2) + grad.row(3));
            const Eigen::Vector3d w(wx, wy, wz);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double k =
                        vol * (grad.row(i).cwiseProduct(grad.row(j)) * w).value();
                    const double m = vol / 20.0 * (i == j ? 2.0 : 1.0);
                    kg.emplace_back(el.nodes[i], el.nodes[j], k);
                    km.emplace_back(el.nodes[i], el.nodes[j], m);
                }
        }
    }
}

/// Mass along a node chain against a piecewise-linear coefficient sampled at
/// the chain nodes; exact integrals of coefficient times products of the two
/// hat functions on each segment.
void add_coef_chain_mass(std::vector<Triplet>& out, const std::vector<int>& chain, double h,
                         const std::vector<double>& coef, double weight) {
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
        const double a0 = coef[k], a1 = coef[k + 1];
        const double m00 = weight * h * (3.0 * a0 + a1) / 12.0;
        const double m01 = weight * h * (a0 + a1) / 12.0;
        const double m11 = weight * h * (a0 + 3.0 * a1) / 12.0;
        out.emplace_back(chain[k], chain[k], m00);
        out.emplace_back(chain[k], chain[k + 1], m01);
        out.emplace_back(chain[k + 1], chain[k], m01);
        out.emplace_back(chain[k + 1], chain[k + 1], m11);
    }
}

/// Constant-coefficient mass coupling two equally subdivided chains.
void add_cross_chain_mass(std::vector<Triplet>& out, const std::vector<int>& a,
                          const std::vector<int>& b, double h, double weight) {
    for (size_t k = 0; k + 1 < a.size(); ++k) {
        out.emplace_back(a[k], b[k], weight * h / 3.0);
        out.emplace_back(a[k], b[k + 1], weight * h / 6.0);
        out.emplace_back(a[k + 1], b[k], weight * h / 6.0);
        out.emplace_back(a[k + 1], b[k + 1], weight * h / 3.0);
    }
}

SpMat from_triplets(int n, const std::vector<Triplet>& t) {
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SpMat symmetrized(const SpMat& m) { return 0.5 * (m + SpMat(m.transpose())); }

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    // Smaller index wins, so every root is the least member of its set.
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }
};

struct RawConstraint {
    Eigen::MatrixXd P;       // rows: conditions; cols: slots
    std::vector<int> nodes;  // raw node per slot
};

/// Builds the reduction basis from merges, zero constraints, and projector
/// constraints. Overlapping constraints (shared roots) are stacked and solved
/// jointly; kernel bases are orthonormalized.
SpMat finalize_reduction(int n, UnionFind& uf, std::vector<char>& elim,
                         std::vector<EliminationRecord>& rec,
                         const std::vector<RawConstraint>& cons) {
    std::vector<char> elim_root(n, 0);
    for (int i = 0; i < n; ++i)
        if (elim[i]) elim_root[uf.find(i)] = 1;

    // Group constraints whose variable sets intersect.
    std::vector<int> group(cons.size());
    std::iota(group.begin(), group.end(), 0);
    {
        std::unordered_map<int, int> owner;  // root -> constraint group
        std::function<int(int)> gfind = [&](int c) {
            while (group[c] != c) {
                group[c] = group[group[c]];
                c = group[c];
            }
            return c;
        };
        for (size_t c = 0; c < cons.size(); ++c)
            for (int node : cons[c].nodes) {
                const int r = uf.find(node);
                if (elim_root[r]) continue;
                auto it = owner.find(r);
                if (it == owner.end()) {
                    owner.emplace(r, static_cast<int>(c));
                } else {
                    int a = gfind(it->second), b = gfind(static_cast<int>(c));
                    if (a != b) group[std::max(a, b)] = std::min(a, b);
                }
            }
        for (size_t c = 0; c < cons.size(); ++c) group[c] = gfind(static_cast<int>(c));
    }

    struct NodeClass {
        std::vector<int> roots;  // ascending
        Eigen::MatrixXd Z;       // orthonormal kernel basis, rows follow roots
    };
    std::vector<NodeClass> classes;
    std::vector<int> root_class(n, -1);
    std::map<int, std::vector<int>> members;  // group leader -> constraint list
    for (size_t c = 0; c < cons.size(); ++c) members[group[c]].push_back(static_cast<int>(c));
    for (const auto& [leader, list] : members) {
        std::vector<int> roots;
        int rows = 0;
        for (int c : list) {
            rows += static_cast<int>(cons[c].P.rows());
            for (int node : cons[c].nodes) {
                const int r = uf.find(node);
                if (!elim_root[r]) roots.push_back(r);
            }
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        if (roots.empty()) continue;
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows, static_cast<int>(roots.size()));
        int row0 = 0;
        for (int c : list) {
            for (int col = 0; col < static_cast<int>(cons[c].nodes.size()); ++col) {
                const int r = uf.find(cons[c].nodes[col]);
                if (elim_root[r]) continue;
                const int j = static_cast<int>(
                    std::lower_bound(roots.begin(), roots.end(), r) - roots.begin());
                S.block(row0, j, cons[c].P.rows(), 1) += cons[c].P.col(col);
            }
            row0 += static_cast<int>(cons[c].P.rows());
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
        lu.setThreshold(1e-10);
        if (lu.rank() == static_cast<int>(roots.size())) {
            for (int r : roots) {
                elim_root[r] = 1;
                rec.push_back({r, "projector-constraint"});
            }
            continue;
        }
        Eigen::MatrixXd ker = lu.kernel();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(ker);
        Eigen::MatrixXd Z = qr.householderQ() *
                            Eigen::MatrixXd::Identity(ker.rows(), ker.cols());
        NodeClass nc{roots, Z};
        const int id = static_cast<int>(classes.size());
        for (int r : roots) root_class[r] = id;
        classes.push_back(std::move(nc));
    }

    std::vector<int> col_of_root(n, -1);
    std::vector<int> class_col(classes.size(), -1);
    int ncols = 0;
    for (int i = 0; i < n; ++i) {
        if (uf.find(i) != i || elim_root[i]) continue;
        const int c = root_class[i];
        if (c >= 0) {
            if (class_col[c] < 0) {
                class_col[c] = ncols;
                ncols += static_cast<int>(classes[c].Z.cols());
            }
        } else {
            col_of_root[i] = ncols++;
        }
    }

    std::vector<Triplet> tt;
    tt.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (elim_root[r]) continue;
        const int c = root_class[r];
        if (c >= 0) {
            const NodeClass& nc = classes[c];
            const int row = static_cast<int>(
                std::lower_bound(nc.roots.begin(), nc.roots.end(), r) - nc.roots.begin());
            for (int j = 0; j < nc.Z.cols(); ++j) {
                const double v = nc.Z(row, j);
                if (v != 0.0) tt.emplace_back(i, class_col[c] + j, v);
            }
        } else {
            tt.emplace_back(i, col_of_root[r], 1.0);
        }
    }
    SpMat T(n, ncols);
    T.setFromTriplets(tt.begin(), tt.end());
    return T;
}

std::vector<int> vertex_slots(const MetricGraph& g, int v) {
    std::vector<int> slots;
    for (int e = 0; e < g.num_edges(); ++e)
        for (int side = 0; side < 2; ++side)
            if (g.endpoint_vertex(e, side) == v) slots.push_back(slot_index(e, side));
    return slots;
}

}  // namespace

RawForms assemble_raw(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                      const VertexConditions& vc, const ContactSpec& cs, FormWeights weights,
                      bool parallel) {
    if (vc.y_dependent())
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "assembly supports only position-independent vertex maps");
    const int n = mesh.num_nodes();
    const int N = dd.particle_count;
    const bool reduced = weights == FormWeights::BosonicReduced;
    const double wx = reduced ? static_cast<double>(N) : 1.0;
    const double wyz = reduced ? 0.0 : 1.0;

    std::vector<Triplet> tg, tm;
    tg.reserve(mesh.elements.size() * (mesh.dim == 2 ? 9 : 16));
    tm.reserve(tg.capacity());
#ifdef _OPENMP
    if (parallel && omp_get_max_threads() > 1) {
        const int nt = omp_get_max_threads();
        std::vector<std::vector<Triplet>> pg(nt), pm(nt);
#pragma omp parallel
        {
            const int t = omp_get_thread_num();
            const size_t lo = mesh.elements.size() * t / nt;
            const size_t hi = mesh.elements.size() * (t + 1) / nt;
            element_triplets(mesh, wx, wyz, wyz, lo, hi, pg[t], pm[t]);
        }
        for (int t = 0; t < nt; ++t) {
            tg.insert(tg.end(), pg[t].begin(), pg[t].end());
            tm.insert(tm.end(), pm[t].begin(), pm[t].end());
        }
    } else
#endif
    {
        (void)parallel;
        element_triplets(mesh, wx, wyz, wyz, 0, mesh.elements.size(), tg, tm);
    }

    std::vector<Triplet> tb, tf;
    if (N == 2) {
        if (cs.kind == ContactSpec::Kind::Delta) {
            const double wplus = reduced ? 1.0 : 0.5;
            const double wminus = reduced ? 0.0 : 0.5;
            for (int e = 0; e < g.num_edges(); ++e) {
                const int ne = mesh.edge_subdiv[e];
                const double he = mesh.edge_length[e] / ne;
                std::vector<double> coef(ne + 1);
                for (int k = 0; k <= ne; ++k)
                    coef[k] = cs.alpha(static_cast<double>(k) / ne);
                add_coef_chain_mass(tb, mesh.component_nodes[2 * e], he, coef, wplus);
                if (wminus != 0.0)
                    add_coef_chain_mass(tb, mesh.component_nodes[2 * e + 1], he, coef, wminus);
            }
        }

        const auto lifted = lift_vertex_conditions(vc, g, dd.layout);
        const Eigen::MatrixXd& Lv = lifted.second;
        const int cd = dd.layout.contact_dim;
        for (int a = cd; a < dd.layout.dim(); ++a) {
            const LayoutComponent& ca = dd.layout.components[a];
            for (int b = cd; b < dd.layout.dim(); ++b) {
                const double lab = Lv(a - cd, b - cd);
                if (lab == 0.0) continue;
                if (reduced && ca.axis != 0) continue;
                const LayoutComponent& cb = dd.layout.components[b];
                const int esp = ca.edges[1 - ca.axis];
                const double hstd = 1.0 / mesh.edge_subdiv[esp];
                const double w = (reduced ? static_cast<double>(N) : 1.0) * ca.value_scale *
                                 cb.value_scale;
                add_cross_chain_mass(tb, mesh.component_nodes[a], mesh.component_nodes[b], hstd,
                                     -w * lab);
            }
        }

        for (int a = cd; a < dd.layout.dim(); ++a) {
            const LayoutComponent& ca = dd.layout.components[a];
            const int esp = ca.edges[1 - ca.axis];
            const double hp = mesh.edge_length[esp] / mesh.edge_subdiv[esp];
            add_cross_chain_mass(tf, mesh.component_nodes[a], mesh.component_nodes[a], hp, 1.0);
        }
    } else {
        if (vc.L.size() > 0 && vc.L.cwiseAbs().maxCoeff() > 1e-14)
            throw Error(ErrorCode::UnsupportedConfiguration,
                        "vertex coupling terms are unsupported for three particles");
        if (cs.kind == ContactSpec::Kind::Delta) {
            if (!cs.alpha_constant(1e-14))
                throw Error(ErrorCode::UnsupportedConfiguration,
                            "three-particle contact requires constant coupling");
            const double alpha = cs.alpha(0.0);
            const double hh = mesh.edge_length[0] / mesh.edge_subdiv[0];
            const double tol = 0.5 * hh;
            const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
            const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
            for (const MeshElement& el : mesh.elements) {
                for (const auto& f : faces) {
                    const int na = el.nodes[f[0]], nb = el.nodes[f[1]], nc = el.nodes[f[2]];
                    for (const auto& pq : pairs) {
                        const int p = pq[0], q = pq[1];
                        bool on = true;
                        for (int node : {na, nb, nc})
                            if (std::abs(mesh.coords[node][p] - mesh.coords[node][q]) > tol) {
                                on = false;
                                break;
                            }
                        if (!on) continue;
                        double w = reduced ? (p == 0 && q == 1
                                                  ? 0.5 * alpha * N * (N - 1) / 2.0
                                                  : 0.0)
                                           : 0.5 * alpha;
                        if (w == 0.0) continue;
                        // Coordinate-measure area via the (x_p, x_r) chart of
                        // the plane x_p = x_q.
                        const int r = 3 - p - q;
                        const auto& u0 = mesh.coords[na];
                        const auto& u1 = mesh.coords[nb];
                        const auto& u2 = mesh.coords[nc];
                        const double a1 = u1[p] - u0[p], b1 = u1[r] - u0[r];
                        const double a2 = u2[p] - u0[p], b2 = u2[r] - u0[r];
                        const double area = 0.5 * std::abs(a1 * b2 - a2 * b1);
                        const int tri[3] = {na, nb, nc};
                        for (int i = 0; i < 3; ++i)
                            for (int j = 0; j < 3; ++j)
                                tb.emplace_back(tri[i], tri[j],
                                                w * area / 12.0 * (i == j ? 2.0 : 1.0));
                    }
                }
            }
        }
    }

    RawForms raw;
    raw.gradient = symmetrized(from_triplets(n, tg));
    raw.mass = symmetrized(from_triplets(n, tm));
    raw.boundary = symmetrized(from_triplets(n, tb));
    raw.face_mass = symmetrized(from_triplets(n, tf));
    return raw;
}

Reduction build_reduction(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                          const VertexConditions& vc, const ContactSpec& cs,
                          ConstraintVariant variant) {
    const int n = mesh.num_nodes();
    Reduction red;
    if (variant != ConstraintVariant::Physical && dd.particle_count != 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "comparison problems are supported for two particles only");

    if (variant == ConstraintVariant::RobinComparison) {
        red.T.resize(n, n);
        red.T.setIdentity();
        return red;
    }

    UnionFind uf(n);
    std::vector<char> elim(n, 0);
    auto eliminate = [&](int node, const char* why) {
        if (!elim[node]) {
            elim[node] = 1;
            red.eliminated.push_back({node, why});
        }
    };
    std::vector<RawConstraint> cons;

    if (variant == ConstraintVariant::DirichletComparison) {
        for (const auto& chain : mesh.component_nodes)
            for (int node : chain) eliminate(node, "comparison-dirichlet");
        red.T = finalize_reduction(n, uf, elim, red.eliminated, cons);
        return red;
    }

    const int cd = dd.layout.contact_dim;
    if (dd.particle_count == 2) {
        for (int e = 0; e < g.num_edges(); ++e) {
            const auto& plus = mesh.component_nodes[2 * e];
            const auto& minus = mesh.component_nodes[2 * e + 1];
            if (cs.kind == ContactSpec::Kind::Hardcore) {
                for (int node : plus) eliminate(node, "hardcore-diagonal");
                for (int node : minus) eliminate(node, "hardcore-diagonal");
            } else {
                for (size_t k = 0; k < plus.size(); ++k) uf.unite(plus[k], minus[k]);
            }
        }

        const VertexConditionAnalysis analysis = analyze_vertex_conditions(vc, g);
        if (analysis.vertex_local) {
            for (int v = 0; v < g.num_vertices(); ++v) {
                switch (analysis.kinds[v]) {
                    case VertexKind::Continuity:
                        for (int axis = 0; axis < 2; ++axis)
                            for (int esp = 0; esp < g.num_edges(); ++esp) {
                                const std::vector<int>* first = nullptr;
                                for (int a = cd; a < dd.layout.dim(); ++a) {
                                    const LayoutComponent& c = dd.layout.components[a];
                                    if (c.vertex != v || c.axis != axis ||
                                        c.edges[1 - axis] != esp)
                                        continue;
                                    const auto& chain = mesh.component_nodes[a];
                                    if (!first) {
                                        first = &chain;
                                    } else {
                                        for (size_t k = 0; k < chain.size(); ++k)
                                            uf.unite((*first)[k], chain[k]);
                                    }
                                }
                            }
                        break;
                    case VertexKind::Dirichlet:
                        for (int a = cd; a < dd.layout.dim(); ++a)
                            if (dd.layout.components[a].vertex == v)
                                for (int node : mesh.component_nodes[a])
                                    eliminate(node, "dirichlet-vertex");
                        break;
                    case VertexKind::Neumann:
                        break;
                    case VertexKind::Custom: {
                        const std::vector<int> slots = vertex_slots(g, v);
                        Eigen::MatrixXd Pv(slots.size(), slots.size());
                        for (size_t i = 0; i < slots.size(); ++i)
                            for (size_t j = 0; j < slots.size(); ++j)
                                Pv(i, j) = vc.P(slots[i], slots[j]);
                        for (int axis = 0; axis < 2; ++axis)
                            for (int esp = 0; esp < g.num_edges(); ++esp) {
                                std::vector<const std::vector<int>*> chains;
                                for (int slot : slots) {
                                    const int e = slot / 2, side = slot % 2;
                                    const std::vector<int> edges =
                                        axis == 0 ? std::vector<int>{e, esp}
                                                  : std::vector<int>{esp, e};
                                    chains.push_back(&mesh.component_nodes[face_component(
                                        dd.layout, edges, axis, side)]);
                                }
                                const size_t len = chains.empty() ? 0 : chains[0]->size();
                                for (size_t k = 0; k < len; ++k) {
                                    RawConstraint rc;
                                    rc.P = Pv;
                                    for (const auto* ch : chains) rc.nodes.push_back((*ch)[k]);
                                    cons.push_back(std::move(rc));
                                }
                            }
                        break;
                    }
                }
            }
        } else {
            const int ns = 2 * g.num_edges();
            for (int axis = 0; axis < 2; ++axis)
                for (int esp = 0; esp < g.num_edges(); ++esp) {
                    std::vector<const std::vector<int>*> chains;
                    for (int slot = 0; slot < ns; ++slot) {
                        const int e = slot / 2, side = slot % 2;
                        const std::vector<int> edges = axis == 0 ? std::vector<int>{e, esp}
                                                                 : std::vector<int>{esp, e};
                        chains.push_back(&mesh.component_nodes[face_component(dd.layout, edges,
                                                                              axis, side)]);
                    }
                    for (size_t k = 0; k < chains[0]->size(); ++k) {
                        RawConstraint rc;
                        rc.P = vc.P;
                        for (const auto* ch : chains) rc.nodes.push_back((*ch)[k]);
                        cons.push_back(std::move(rc));
                    }
                }
        }
    } else {
        for (int c = 0; c + 1 < cd; c += 2) {
            const auto& s0 = mesh.component_nodes[c];
            const auto& s1 = mesh.component_nodes[c + 1];
            if (cs.kind == ContactSpec::Kind::Hardcore) {
                for (int node : s0) eliminate(node, "hardcore-diagonal");
                for (int node : s1) eliminate(node, "hardcore-diagonal");
            } else {
                for (size_t k = 0; k < s0.size(); ++k) uf.unite(s0[k], s1[k]);
            }
        }

        const VertexConditionAnalysis analysis = analyze_vertex_conditions(vc, g);
        if (!analysis.vertex_local)
            throw Error(ErrorCode::UnsupportedConfiguration,
                        "three-particle assembly supports per-vertex presets only");
        const int nsub = mesh.edge_subdiv[0];
        for (int v = 0; v < g.num_vertices(); ++v) {
            std::vector<int> sides;
            for (int side = 0; side < 2; ++side)
                if (g.endpoint_vertex(0, side) == v) sides.push_back(side);
            if (analysis.kinds[v] == VertexKind::Dirichlet) {
                for (int a = cd; a < dd.layout.dim(); ++a) {
                    const LayoutComponent& c = dd.layout.components[a];
                    if (std::find(sides.begin(), sides.end(), c.side) == sides.end()) continue;
                    for (int node : mesh.component_nodes[a]) eliminate(node, "dirichlet-vertex");
                }
            } else if (analysis.kinds[v] == VertexKind::Continuity && sides.size() == 2) {
                for (int d = 0; d < 3; ++d) {
                    std::unordered_map<long, int> first;  // other-coords key -> node
                    for (int a = cd; a < dd.layout.dim(); ++a) {
                        const LayoutComponent& c = dd.layout.components[a];
                        if (c.axis != d) continue;
                        for (int node : mesh.component_nodes[a]) {
                            const double hh = mesh.edge_length[0] / nsub;
                            long key = 0;
                            for (int dj = 0; dj < 3; ++dj) {
                                if (dj == d) continue;
                                key = key * (nsub + 1) +
                                      static_cast<long>(
                                          std::lround(mesh.coords[node][dj] / hh));
                            }
                            auto it = first.find(key);
                            if (it == first.end())
                                first.emplace(key, node);
                            else
                                uf.unite(it->second, node);
                        }
                    }
                }
            } else if (analysis.kinds[v] == VertexKind::Custom) {
                throw Error(ErrorCode::UnsupportedConfiguration,
                            "three-particle assembly supports per-vertex presets only");
            }
        }
    }

    red.T = finalize_reduction(n, uf, elim, red.eliminated, cons);
    return red;
}

DiscreteForm assemble(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                      const VertexConditions& vc, const ContactSpec& cs, FormWeights weights,
                      ConstraintVariant variant, bool parallel) {
    RawForms raw = assemble_raw(g, mesh, dd, vc, cs, weights, parallel);
    Reduction red = build_reduction(g, mesh, dd, vc, cs, variant);

    SpMat S;
    if (variant == ConstraintVariant::RobinComparison) {
        const double lam = robin_lambda_bar(vc, cs);
        S = raw.gradient - lam * raw.face_mass;
    } else {
        S = raw.gradient + raw.boundary;
    }

    DiscreteForm df;
    df.K = symmetrized(SpMat(red.T.transpose() * S * red.T));
    df.M = symmetrized(SpMat(red.T.transpose() * raw.mass * red.T));
    df.T = std::move(red.T);
    df.raw = std::move(raw);
    df.eliminated = std::move(red.eliminated);
    df.quadrature = "closed-form piecewise-linear integrals (elements and traces)";
    df.contact_measure = "coordinate measure dt along each diagonal";
    return df;
}

double form_value(const DiscreteForm& df, const Eigen::VectorXd& coeffs) {
    if (coeffs.size() != df.K.rows())
        throw Error(ErrorCode::DimensionMismatch, "coefficient vector does not match the form");
    return coeffs.dot(df.K * coeffs);
}

std::vector<SpMat> symmetry_forms(const Mesh& mesh, const DiscreteForm& df) {
    std::vector<SpMat> out;
    out.reserve(mesh.symmetry_nodes.size());
    for (const auto& perm : mesh.symmetry_nodes) {
        std::vector<Triplet> tt;
        tt.reserve(df.T.nonZeros());
        for (int k = 0; k < df.T.outerSize(); ++k)
            for (SpMat::InnerIterator it(df.T, k); it; ++it)
                tt.emplace_back(perm[it.row()], static_cast<int>(it.col()), it.value());
        SpMat Tg(df.T.rows(), df.T.cols());
        Tg.setFromTriplets(tt.begin(), tt.end());
        out.emplace_back(df.T.transpose() * (df.raw.mass * Tg));
    }
    return out;
}

OneParticleForm assemble_one_particle(const MetricGraph& g, const VertexConditions& vc,
                                      double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw Error(ErrorCode::InvalidH, "mesh parameter h must be positive and finite");
    if (vc.y_dependent())
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "assembly supports only position-independent vertex maps");

    const int E = g.num_edges();
    std::vector<int> sub(E), offset(E);
    int n = 0;
    for (int e = 0; e < E; ++e) {
        sub[e] = subdivisions_for(g.edge(e).length, h);
        offset[e] = n;
        n += sub[e] + 1;
    }
    auto slot_node = [&](int slot) {
        const int e = slot / 2, side = slot % 2;
        return offset[e] + (side == 0 ? 0 : sub[e]);
    };

    std::vector<Triplet> tk, tm;
    for (int e = 0; e < E; ++e) {
        const double he = g.edge(e).length / sub[e];
        for (int k = 0; k < sub[e]; ++k) {
            const int a = offset[e] + k, b = a + 1;
            tk.emplace_back(a, a, 1.0 / he);
            tk.emplace_back(b, b, 1.0 / he);
            tk.emplace_back(a, b, -1.0 / he);
            tk.emplace_back(b, a, -1.0 / he);
            // Half consistent, half lumped: fourth-order dispersion.
            tm.emplace_back(a, a, 5.0 * he / 12.0);
            tm.emplace_back(b, b, 5.0 * he / 12.0);
            tm.emplace_back(a, b, he / 12.0);
            tm.emplace_back(b, a, he / 12.0);
        }
    }
    for (int a = 0; a < 2 * E; ++a)
        for (int b = 0; b < 2 * E; ++b) {
            const double lab = vc.L(a, b);
            if (lab != 0.0) tk.emplace_back(slot_node(a), slot_node(b), -lab);
        }

    UnionFind uf(n);
    std::vector<char> elim(n, 0);
    std::vector<EliminationRecord> rec;
    std::vector<RawConstraint> cons;
    const VertexConditionAnalysis analysis = analyze_vertex_conditions(vc, g);
    if (analysis.vertex_local) {
        for (int v = 0; v < g.num_vertices(); ++v) {
            const std::vector<int> slots = vertex_slots(g, v);
            switch (analysis.kinds[v]) {
                case VertexKind::Continuity:
                    for (size_t j = 1; j < slots.size(); ++j)
                        uf.unite(slot_node(slots[0]), slot_node(slots[j]));
                    break;
                case VertexKind::Dirichlet:
                    for (int slot : slots) {
                        const int node = slot_node(slot);
                        if (!elim[node]) {
                            elim[node] = 1;
                            rec.push_back({node, "dirichlet-vertex"});
                        }
                    }
                    break;
                case VertexKind::Neumann:
                    break;
                case VertexKind::Custom: {
                    RawConstraint rc;
                    rc.P.resize(slots.size(), slots.size());
                    for (size_t i = 0; i < slots.size(); ++i)
                        for (size_t j = 0; j < slots.size(); ++j)
                            rc.P(i, j) = vc.P(slots[i], slots[j]);
                    for (int slot : slots) rc.nodes.push_back(slot_node(slot));
                    cons.push_back(std::move(rc));
                    break;
                }
            }
        }
    } else {
        RawConstraint rc;
        rc.P = vc.P;
        for (int slot = 0; slot < 2 * E; ++slot) rc.nodes.push_back(slot_node(slot));
        cons.push_back(std::move(rc));
    }

    OneParticleForm f;
    f.T = finalize_reduction(n, uf, elim, rec, cons);
    SpMat K = from_triplets(n, tk), M = from_triplets(n, tm);
    f.K = symmetrized(SpMat(f.T.transpose() * K * f.T));
    f.M = symmetrized(SpMat(f.T.transpose() * M * f.T));
    f.edge_subdiv = std::move(sub);
    return f;
}

}  // namespace qgraph
