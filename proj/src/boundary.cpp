#include "qgraph/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgraph {

namespace {

double op_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return a.jacobiSvd().singularValues()(0);
}

double sym_op_norm(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<std::vector<int>> permutations_lex(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

void append_pair_faces(BoundaryLayout& lay, const MetricGraph& g, int e1, int e2) {
    const double l1 = g.edge(e1).length, l2 = g.edge(e2).length;
    const bool square = (e1 == e2);
    // bv order: x=0, x=l_{e1}, y=0, y=l_{e2}; on squares the x=0 and y=l faces
    // lie on the minus triangle, the other two on the plus triangle.
    const int cells[4] = {square ? 1 : 0, 0, 0, square ? 1 : 0};
    const int axes[4] = {0, 0, 1, 1};
    const int sides[4] = {0, 1, 0, 1};
    const double scales[4] = {std::sqrt(l2), std::sqrt(l2), std::sqrt(l1), std::sqrt(l1)};
    for (int k = 0; k < 4; ++k) {
        LayoutComponent c;
        c.edges = {e1, e2};
        c.cell = cells[k];
        c.kind = LayoutComponent::Kind::VertexFace;
        c.axis = axes[k];
        c.side = sides[k];
        c.vertex = g.endpoint_vertex(axes[k] == 0 ? e1 : e2, sides[k]);
        c.value_scale = scales[k];
        c.derivative_scale = scales[k];
        lay.components.push_back(c);
    }
}

}  // namespace

BoundaryLayout build_layout(const MetricGraph& g, int particle_count, Statistics statistics) {
    if (particle_count < 1)
        throw Error(ErrorCode::ValidationError, "particle count must be >= 1");
    if (statistics == Statistics::Bosonic && particle_count < 2)
        throw Error(ErrorCode::ValidationError, "bosonic statistics requires N >= 2");
    const int E = g.num_edges();
    BoundaryLayout lay;
    lay.particle_count = particle_count;
    lay.statistics = statistics;

    if (particle_count == 1) {
        lay.contact_dim = 0;
        for (int e = 0; e < E; ++e)
            for (int side = 0; side < 2; ++side) {
                LayoutComponent c;
                c.edges = {e};
                c.kind = LayoutComponent::Kind::VertexFace;
                c.axis = 0;
                c.side = side;
                c.vertex = g.endpoint_vertex(e, side);
                lay.components.push_back(c);
            }
        return lay;
    }

    if (particle_count == 2) {
        if (statistics == Statistics::Distinguishable) {
            for (int e = 0; e < E; ++e) {
                const double l = g.edge(e).length;
                for (int side = 0; side < 2; ++side) {
                    LayoutComponent c;
                    c.edges = {e, e};
                    c.cell = side;
                    c.kind = LayoutComponent::Kind::Diagonal;
                    c.side = side;
                    c.value_scale = std::sqrt(l);
                    c.derivative_scale = std::sqrt(2.0 * l);
                    lay.components.push_back(c);
                }
            }
            lay.contact_dim = 2 * E;
            for (int e1 = 0; e1 < E; ++e1)
                for (int e2 = 0; e2 < E; ++e2) append_pair_faces(lay, g, e1, e2);
        } else {
            for (int e = 0; e < E; ++e) {
                const double l = g.edge(e).length;
                LayoutComponent c;
                c.edges = {e, e};
                c.cell = 0;
                c.kind = LayoutComponent::Kind::Diagonal;
                c.side = 0;
                c.value_scale = std::sqrt(l);
                c.derivative_scale = std::sqrt(2.0 * l);
                lay.components.push_back(c);
            }
            lay.contact_dim = E;
            // Exchange symmetry reduces the vertex block to the x-direction
            // faces of all ordered pairs; the y-faces are their exchange
            // images. On squares the x=0 face lies on the minus triangle and
            // the x=l face on the plus triangle.
            for (int e1 = 0; e1 < E; ++e1)
                for (int e2 = 0; e2 < E; ++e2) {
                    const bool square = (e1 == e2);
                    const double scale = std::sqrt(g.edge(e2).length);
                    for (int side = 0; side < 2; ++side) {
                        LayoutComponent c;
                        c.edges = {e1, e2};
                        c.cell = square && side == 0 ? 1 : 0;
                        c.kind = LayoutComponent::Kind::VertexFace;
                        c.axis = 0;
                        c.side = side;
                        c.vertex = g.endpoint_vertex(e1, side);
                        c.value_scale = scale;
                        c.derivative_scale = scale;
                        lay.components.push_back(c);
                    }
                }
        }
        return lay;
    }

    if (E != 1)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "N >= 3 layouts are only available on single-edge graphs");

    const int N = particle_count;
    const double l = g.edge(0).length;
    const double face_scale = std::pow(l, 0.5 * (N - 1));
    const auto perms = permutations_lex(N);

    auto emit_diagonal = [&](int cell, int axis, int side) {
        LayoutComponent c;
        c.edges.assign(N, 0);
        c.cell = cell;
        c.kind = LayoutComponent::Kind::Diagonal;
        c.axis = axis;
        c.side = side;
        c.value_scale = face_scale;
        c.derivative_scale = std::sqrt(2.0) * face_scale;
        lay.components.push_back(c);
    };
    auto emit_face = [&](int cell, int axis, int side) {
        LayoutComponent c;
        c.edges.assign(N, 0);
        c.cell = cell;
        c.kind = LayoutComponent::Kind::VertexFace;
        c.axis = axis;
        c.side = side;
        c.vertex = g.endpoint_vertex(0, side);
        c.value_scale = face_scale;
        c.derivative_scale = face_scale;
        lay.components.push_back(c);
    };

    if (statistics == Statistics::Distinguishable) {
        for (int r = 0; r < static_cast<int>(perms.size()); ++r)
            for (int i = 0; i + 1 < N; ++i) {
                std::vector<int> tau = perms[r];
                std::swap(tau[i], tau[i + 1]);
                const int rt = static_cast<int>(
                    std::lower_bound(perms.begin(), perms.end(), tau) - perms.begin());
                if (r < rt) {
                    emit_diagonal(r, i, 0);
                    emit_diagonal(rt, i, 1);
                }
            }
        lay.contact_dim = static_cast<int>(lay.components.size());
        for (int r = 0; r < static_cast<int>(perms.size()); ++r) {
            emit_face(r, perms[r][0], 0);
            emit_face(r, perms[r][N - 1], 1);
        }
    } else {
        // Exchange symmetry reduces the contact block to the single plane
        // x_1 = x_2 and the vertex block to the two x_1-faces. Cell picks: the
        // identity ordering contains the full x_1 = 0 face and touches the
        // plane x_1 = x_2 between its lowest sorted slots; the x_1 = l face
        // lies on the cell where x_1 is largest.
        emit_diagonal(0, 0, 0);
        lay.contact_dim = 1;
        emit_face(0, 0, 0);
        std::vector<int> top(N);
        for (int i = 0; i + 1 < N; ++i) top[i] = i + 1;
        top[N - 1] = 0;
        const int top_rank = static_cast<int>(
            std::lower_bound(perms.begin(), perms.end(), top) - perms.begin());
        emit_face(top_rank, 0, 1);
    }
    return lay;
}

namespace {

void fill_continuity_block(VertexConditions& vc, const MetricGraph& g, int v, double s) {
    const auto& inc = g.incident(v);
    const int d = static_cast<int>(inc.size());
    if (d == 0) return;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const int si = slot_index(inc[i].edge, inc[i].side);
            const int sj = slot_index(inc[j].edge, inc[j].side);
            vc.P(si, sj) = (i == j ? 1.0 : 0.0) - 1.0 / d;
            vc.L(si, sj) = -s / (static_cast<double>(d) * d);
        }
}

void fill_preset_block(VertexConditions& vc, const MetricGraph& g, int v,
                       const std::string& name, double strength) {
    if (name == "neumann") return;
    if (name == "dirichlet") {
        for (const EndpointRef& ref : g.incident(v)) {
            const int s = slot_index(ref.edge, ref.side);
            vc.P(s, s) = 1.0;
        }
        return;
    }
    if (name == "kirchhoff") {
        fill_continuity_block(vc, g, v, 0.0);
        return;
    }
    if (name == "delta_vertex") {
        fill_continuity_block(vc, g, v, strength);
        return;
    }
    throw Error(ErrorCode::UnknownPreset, "unknown vertex preset '" + name + "'");
}

}  // namespace

VertexConditions preset_vertex_conditions(const std::string& name, const MetricGraph& g,
                                          double strength) {
    const int n = 2 * g.num_edges();
    VertexConditions vc;
    vc.preset = name;
    vc.strength = strength;
    vc.P = Eigen::MatrixXd::Zero(n, n);
    vc.L = Eigen::MatrixXd::Zero(n, n);
    if (name == "dirichlet") {
        vc.P.setIdentity();
        return vc;
    }
    if (name == "neumann") return vc;
    if (name == "kirchhoff" || name == "delta_vertex") {
        for (int v = 0; v < g.num_vertices(); ++v)
            fill_continuity_block(vc, g, v, name == "delta_vertex" ? strength : 0.0);
        return vc;
    }
    throw Error(ErrorCode::UnknownPreset, "unknown vertex preset '" + name + "'");
}

VertexConditions per_vertex_conditions(const MetricGraph& g,
                                       const std::map<std::string, PerVertexEntry>& entries,
                                       const std::string& default_preset) {
    const int n = 2 * g.num_edges();
    VertexConditions vc;
    vc.preset = "per_vertex";
    vc.P = Eigen::MatrixXd::Zero(n, n);
    vc.L = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [id, entry] : entries)
        if (g.vertex_index(id) < 0)
            throw Error(ErrorCode::ValidationError,
                        "per-vertex conditions reference unknown vertex '" + id + "'");
    for (int v = 0; v < g.num_vertices(); ++v) {
        auto it = entries.find(g.vertex_ids()[v]);
        const std::string& name = it == entries.end() ? default_preset : it->second.preset;
        const double s = it == entries.end() ? 0.0 : it->second.strength;
        fill_preset_block(vc, g, v, name, s);
    }
    return vc;
}

VertexConditions custom_vertex_conditions(const MetricGraph& g, Eigen::MatrixXd P,
                                          Eigen::MatrixXd L, double tol) {
    const int n = 2 * g.num_edges();
    if (P.rows() != n || P.cols() != n || L.rows() != n || L.cols() != n)
        throw Error(ErrorCode::DimensionMismatch,
                    "vertex condition matrices must be " + std::to_string(n) + "x" +
                        std::to_string(n));
    if (op_norm(P - P.transpose()) > tol || op_norm(P * P - P) > tol)
        throw Error(ErrorCode::ValidationError, "P is not an orthogonal projector");
    VertexConditions vc;
    vc.preset = "custom";
    vc.P = 0.5 * (P + P.transpose());
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - vc.P;
    vc.L = Q * (0.5 * (L + L.transpose())) * Q;
    return vc;
}

ContactSpec ContactSpec::none() { return ContactSpec{}; }

ContactSpec ContactSpec::delta_constant(double alpha) {
    ContactSpec c;
    c.kind = Kind::Delta;
    c.alpha_scalar = true;
    c.alpha_samples = {{0.0, alpha}, {1.0, alpha}};
    return c;
}

ContactSpec ContactSpec::delta_samples(std::vector<std::array<double, 2>> samples) {
    if (samples.empty())
        throw Error(ErrorCode::ValidationError, "delta contact needs at least one alpha sample");
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i][0]) || !std::isfinite(samples[i][1]))
            throw Error(ErrorCode::ValidationError, "non-finite alpha sample");
        if (samples[i][0] < -1e-12 || samples[i][0] > 1.0 + 1e-12)
            throw Error(ErrorCode::ValidationError, "alpha sample position outside [0,1]");
        if (i > 0 && samples[i][0] <= samples[i - 1][0])
            throw Error(ErrorCode::ValidationError, "alpha sample positions must be increasing");
    }
    ContactSpec c;
    c.kind = Kind::Delta;
    c.alpha_scalar = false;
    c.alpha_samples = std::move(samples);
    return c;
}

ContactSpec ContactSpec::hardcore() {
    ContactSpec c;
    c.kind = Kind::Hardcore;
    return c;
}

double ContactSpec::alpha(double y) const {
    if (kind != Kind::Delta || alpha_samples.empty()) return 0.0;
    if (y <= alpha_samples.front()[0]) return alpha_samples.front()[1];
    if (y >= alpha_samples.back()[0]) return alpha_samples.back()[1];
    for (size_t i = 1; i < alpha_samples.size(); ++i)
        if (y <= alpha_samples[i][0]) {
            const double y0 = alpha_samples[i - 1][0], y1 = alpha_samples[i][0];
            const double v0 = alpha_samples[i - 1][1], v1 = alpha_samples[i][1];
            const double t = (y - y0) / (y1 - y0);
            return (1.0 - t) * v0 + t * v1;
        }
    return alpha_samples.back()[1];
}

double ContactSpec::max_abs_alpha() const {
    double m = 0.0;
    for (const auto& s : alpha_samples) m = std::max(m, std::abs(s[1]));
    return m;
}

bool ContactSpec::repulsive() const {
    for (const auto& s : alpha_samples)
        if (s[1] < 0.0) return false;
    return true;
}

bool ContactSpec::alpha_constant(double tol) const {
    for (const auto& s : alpha_samples)
        if (std::abs(s[1] - alpha_samples.front()[1]) > tol) return false;
    return true;
}

Eigen::Matrix2d contact_projector() {
    Eigen::Matrix2d p;
    p << 0.5, -0.5, -0.5, 0.5;
    return p;
}

Eigen::Matrix2d contact_l(double alpha) {
    // compressed to ker P: acts as -alpha/2 on the continuity direction (1,1)
    Eigen::Matrix2d q;
    q << 0.5, 0.5, 0.5, 0.5;
    return -0.5 * alpha * q;
}

ValidationReport validate_projector_pair(const Eigen::MatrixXd& P, const Eigen::MatrixXd& L,
                                         double tol) {
    if (P.rows() != P.cols() || L.rows() != L.cols() || P.rows() != L.rows())
        throw Error(ErrorCode::DimensionMismatch, "P and L must be square with equal size");
    ValidationReport rep;
    rep.projector_defect = std::max(op_norm(P - P.transpose()), op_norm(P * P - P));
    rep.l_selfadjoint_defect = op_norm(L - L.transpose());
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(P.rows(), P.cols()) - P;
    rep.l_kernel_defect = op_norm(L - Q * L * Q);
    if (op_norm(P - P.transpose()) > tol) rep.failures.push_back("P is not self-adjoint");
    if (op_norm(P * P - P) > tol) rep.failures.push_back("P is not idempotent");
    if (rep.l_selfadjoint_defect > tol) rep.failures.push_back("L is not self-adjoint");
    if (rep.l_kernel_defect > tol)
        rep.failures.push_back("L is not an endomorphism of ker P");
    rep.pass = rep.failures.empty();
    return rep;
}

namespace {

void merge_reports(ValidationReport& into, const ValidationReport& from,
                   const std::string& context) {
    into.projector_defect = std::max(into.projector_defect, from.projector_defect);
    into.l_selfadjoint_defect = std::max(into.l_selfadjoint_defect, from.l_selfadjoint_defect);
    into.l_kernel_defect = std::max(into.l_kernel_defect, from.l_kernel_defect);
    for (const std::string& f : from.failures) into.failures.push_back(context + ": " + f);
}

}  // namespace

ValidationReport validate_pl(const VertexConditions& vc, const ContactSpec& cs,
                             const MetricGraph& g, double tol) {
    const int n = 2 * g.num_edges();
    if (vc.P.rows() != n || vc.P.cols() != n || vc.L.rows() != n || vc.L.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "vertex condition matrices must be " +
                                                      std::to_string(n) + "x" + std::to_string(n));
    ValidationReport rep;
    if (vc.y_dependent()) {
        if (vc.P_samples.size() != vc.y_grid.size() || vc.L_samples.size() != vc.y_grid.size())
            throw Error(ErrorCode::DimensionMismatch, "sample lists must match the y grid");
        for (size_t k = 0; k < vc.y_grid.size(); ++k)
            merge_reports(rep, validate_projector_pair(vc.P_samples[k], vc.L_samples[k], tol),
                          "vertex block, y=" + std::to_string(vc.y_grid[k]));
    } else {
        merge_reports(rep, validate_projector_pair(vc.P, vc.L, tol), "vertex block");
    }
    if (cs.kind == ContactSpec::Kind::Delta) {
        for (const auto& s : cs.alpha_samples)
            merge_reports(rep, validate_projector_pair(contact_projector(), contact_l(s[1]), tol),
                          "contact block, y=" + std::to_string(s[0]));
    } else if (cs.kind == ContactSpec::Kind::Hardcore) {
        merge_reports(rep,
                      validate_projector_pair(Eigen::Matrix2d::Identity(),
                                              Eigen::Matrix2d::Zero(), tol),
                      "contact block");
    }
    rep.pass = rep.failures.empty();
    return rep;
}

namespace {

bool diagonal_zero_one(const Eigen::MatrixXd& P, double tol) {
    for (int i = 0; i < P.rows(); ++i)
        for (int j = 0; j < P.cols(); ++j) {
            if (i != j && std::abs(P(i, j)) > tol) return false;
            if (i == j && std::abs(P(i, i)) > tol && std::abs(P(i, i) - 1.0) > tol) return false;
        }
    return true;
}

void check_kinks(const std::vector<std::array<double, 2>>& samples, const std::string& what,
                 std::vector<std::string>& warnings) {
    if (samples.size() < 3) return;
    double vmin = samples[0][1], vmax = samples[0][1];
    for (const auto& s : samples) {
        vmin = std::min(vmin, s[1]);
        vmax = std::max(vmax, s[1]);
    }
    const double yrange = samples.back()[0] - samples.front()[0];
    if (yrange <= 0.0) return;
    const double limit = 8.0 * (vmax - vmin + 1e-12) / yrange;
    double prev_slope = 0.0;
    for (size_t i = 1; i < samples.size(); ++i) {
        const double slope =
            (samples[i][1] - samples[i - 1][1]) / (samples[i][0] - samples[i - 1][0]);
        if (i > 1 && std::abs(slope - prev_slope) > limit) {
            warnings.push_back(what + " samples have kinks (discrete C1 check)");
            return;
        }
        prev_slope = slope;
    }
}

}  // namespace

std::vector<std::string> check_regularity_hypotheses(const VertexConditions& vc,
                                                     const ContactSpec& cs) {
    std::vector<std::string> warnings;
    if (cs.kind == ContactSpec::Kind::Delta && cs.alpha_samples.size() >= 2) {
        const auto& s = cs.alpha_samples;
        const bool varies_start = std::abs(s[1][1] - s[0][1]) > 1e-12;
        const bool varies_end = std::abs(s[s.size() - 1][1] - s[s.size() - 2][1]) > 1e-12;
        if (varies_start || varies_end)
            warnings.push_back("alpha not constant near endpoints");
        check_kinks(s, "alpha", warnings);
    }
    if (vc.y_dependent() && vc.y_grid.size() >= 2) {
        const size_t m = vc.y_grid.size();
        const bool p_varies_start = (vc.P_samples[1] - vc.P_samples[0]).norm() > 1e-12;
        const bool p_varies_end = (vc.P_samples[m - 1] - vc.P_samples[m - 2]).norm() > 1e-12;
        if (p_varies_start || p_varies_end)
            warnings.push_back("vertex projector varies near endpoints");
        if (!diagonal_zero_one(vc.P_samples.front(), 1e-12) ||
            !diagonal_zero_one(vc.P_samples.back(), 1e-12))
            warnings.push_back(
                "vertex projector near endpoints is not diagonal with entries in {0,1}");
        const bool l_varies_start = (vc.L_samples[1] - vc.L_samples[0]).norm() > 1e-12;
        const bool l_varies_end = (vc.L_samples[m - 1] - vc.L_samples[m - 2]).norm() > 1e-12;
        if (l_varies_start || l_varies_end)
            warnings.push_back("vertex map L varies near endpoints");
    }
    return warnings;
}

VertexConditionAnalysis analyze_vertex_conditions(const VertexConditions& vc,
                                                  const MetricGraph& g, double tol) {
    VertexConditionAnalysis res;
    const int V = g.num_vertices();
    res.kinds.assign(V, VertexKind::Custom);
    res.strengths.assign(V, 0.0);
    if (vc.y_dependent()) {
        res.vertex_local = false;
        return res;
    }
    // slot -> vertex map; off-block entries make the conditions non-local.
    std::vector<int> slot_vertex(2 * g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e)
        for (int side = 0; side < 2; ++side)
            slot_vertex[slot_index(e, side)] = g.endpoint_vertex(e, side);
    for (int i = 0; i < vc.P.rows(); ++i)
        for (int j = 0; j < vc.P.cols(); ++j)
            if (slot_vertex[i] != slot_vertex[j] &&
                (std::abs(vc.P(i, j)) > tol || std::abs(vc.L(i, j)) > tol)) {
                res.vertex_local = false;
                return res;
            }
    for (int v = 0; v < V; ++v) {
        const auto& inc = g.incident(v);
        const int d = static_cast<int>(inc.size());
        if (d == 0) {
            res.kinds[v] = VertexKind::Neumann;
            continue;
        }
        Eigen::MatrixXd Pb(d, d), Lb(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Pb(i, j) = vc.P(slot_index(inc[i].edge, inc[i].side),
                                slot_index(inc[j].edge, inc[j].side));
                Lb(i, j) = vc.L(slot_index(inc[i].edge, inc[i].side),
                                slot_index(inc[j].edge, inc[j].side));
            }
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
        const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(d, d);
        if (Pb.norm() <= tol && Lb.norm() <= tol) {
            res.kinds[v] = VertexKind::Neumann;
        } else if ((Pb - I).norm() <= tol && Lb.norm() <= tol) {
            res.kinds[v] = VertexKind::Dirichlet;
        } else if ((Pb - (I - J / d)).norm() <= tol) {
            const double s = -Lb(0, 0) * d * d;
            if ((Lb + s / (static_cast<double>(d) * d) * J).norm() <= tol) {
                res.kinds[v] = VertexKind::Continuity;
                res.strengths[v] = s;
            }
        }
    }
    return res;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lift_vertex_conditions(const VertexConditions& vc,
                                                                   const MetricGraph&,
                                                                   const BoundaryLayout& layout) {
    if (layout.particle_count != 2 || layout.statistics != Statistics::Distinguishable)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "vertex-condition lift is defined on the distinguishable two-particle layout");
    if (vc.y_dependent())
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "lift of y-dependent vertex conditions is not supported");
    const int nv = layout.vertex_dim();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nv, nv), L = Eigen::MatrixXd::Zero(nv, nv);
    for (int a = 0; a < nv; ++a) {
        const LayoutComponent& ca = layout.components[layout.contact_dim + a];
        for (int b = 0; b < nv; ++b) {
            const LayoutComponent& cb = layout.components[layout.contact_dim + b];
            if (ca.axis != cb.axis) continue;
            const int spec_a = ca.axis == 0 ? ca.edges[1] : ca.edges[0];
            const int spec_b = cb.axis == 0 ? cb.edges[1] : cb.edges[0];
            if (spec_a != spec_b) continue;
            const int sa = slot_index(ca.edges[ca.axis], ca.side);
            const int sb = slot_index(cb.edges[cb.axis], cb.side);
            P(a, b) = vc.P(sa, sb);
            L(a, b) = vc.L(sa, sb);
        }
    }
    return {P, L};
}

double robin_lambda_bar(const VertexConditions& vc, const ContactSpec& cs) {
    double lam = 0.0;
    if (vc.y_dependent()) {
        for (const auto& L : vc.L_samples) lam = std::max(lam, sym_op_norm(L));
    } else if (vc.L.size() > 0) {
        lam = sym_op_norm(vc.L);
    }
    if (cs.kind == ContactSpec::Kind::Delta) lam = std::max(lam, 0.5 * cs.max_abs_alpha());
    return lam;
}

}  // namespace qgraph
