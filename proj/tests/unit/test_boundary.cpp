#include "doctest.h"
#include "qgraph/boundary.hpp"

#include <cmath>

namespace {

using namespace qgraph;

MetricGraph chain(int edges) {
    std::vector<std::string> verts;
    std::vector<Edge> es;
    for (int v = 0; v <= edges; ++v) verts.push_back("v" + std::to_string(v));
    for (int e = 0; e < edges; ++e)
        es.push_back({"e" + std::to_string(e), verts[e], verts[e + 1], 1.0 + 0.25 * e});
    return MetricGraph(std::move(verts), std::move(es));
}

TEST_CASE("two-particle boundary dimensions follow the edge count") {
    for (int E = 1; E <= 6; ++E) {
        const MetricGraph g = chain(E);
        const BoundaryLayout dist = build_layout(g, 2, Statistics::Distinguishable);
        CHECK(dist.dim() == 4 * E * E + 2 * E);
        CHECK(dist.contact_dim == 2 * E);
        CHECK(dist.vertex_dim() == 4 * E * E);

        const BoundaryLayout bose = build_layout(g, 2, Statistics::Bosonic);
        CHECK(bose.dim() == 2 * E * E + E);
        CHECK(bose.contact_dim == E);
    }
}

TEST_CASE("contact components precede vertex faces and carry the length scale") {
    const MetricGraph g = chain(2);
    const BoundaryLayout layout = build_layout(g, 2, Statistics::Distinguishable);
    for (int i = 0; i < layout.contact_dim; ++i) {
        const LayoutComponent& c = layout.components[i];
        CHECK(c.kind == LayoutComponent::Kind::Diagonal);
        const double l = g.edge(c.edges[0]).length;
        CHECK(c.value_scale == doctest::Approx(std::sqrt(l)));
    }
    for (int i = layout.contact_dim; i < layout.dim(); ++i)
        CHECK(layout.components[i].kind == LayoutComponent::Kind::VertexFace);
}

TEST_CASE("presets produce valid self-adjoint data on a star") {
    const MetricGraph g({"c", "t1", "t2", "t3"},
                        {{"e1", "c", "t1", 1.0}, {"e2", "c", "t2", 1.5}, {"e3", "c", "t3", 2.0}});
    for (const char* name : {"kirchhoff", "dirichlet", "neumann"}) {
        const VertexConditions vc = preset_vertex_conditions(name, g);
        const ValidationReport rep = validate_pl(vc, ContactSpec::none(), g);
        CHECK_MESSAGE(rep.pass, name);
    }
    const VertexConditions dv = preset_vertex_conditions("delta_vertex", g, 1.7);
    CHECK(validate_pl(dv, ContactSpec::none(), g).pass);
    CHECK(dv.strength == doctest::Approx(1.7));
    // the coupling term must actually appear
    CHECK(dv.L.cwiseAbs().maxCoeff() > 0.0);

    const VertexConditionAnalysis an =
        analyze_vertex_conditions(preset_vertex_conditions("dirichlet", g), g);
    CHECK(an.vertex_local);
    for (VertexKind k : an.kinds) CHECK(k == VertexKind::Dirichlet);
}

TEST_CASE("kirchhoff means continuity inside, neumann at loose ends") {
    const MetricGraph g = chain(3);
    const VertexConditionAnalysis an =
        analyze_vertex_conditions(preset_vertex_conditions("kirchhoff", g), g);
    CHECK(an.vertex_local);
    for (int v = 0; v < g.num_vertices(); ++v) {
        const bool interior = g.incident(v).size() > 1;
        CHECK(an.kinds[v] == (interior ? VertexKind::Continuity : VertexKind::Neumann));
    }
    for (double s : an.strengths) CHECK(s == 0.0);
}

TEST_CASE("custom conditions are validated and compressed") {
    const MetricGraph g({"a", "b"}, {{"e", "a", "b", 1.0}});
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd notP = P;
    notP(0, 0) = 0.5;  // not idempotent
    CHECK_THROWS_AS(custom_vertex_conditions(g, notP, Eigen::MatrixXd::Zero(2, 2)), Error);

    // L with a component outside ker P is compressed away
    Eigen::MatrixXd half = Eigen::MatrixXd::Zero(2, 2);
    half(0, 0) = 1.0;  // P = e0 e0^T, ker P = span(e1)
    Eigen::MatrixXd L = Eigen::MatrixXd::Ones(2, 2);
    const VertexConditions vc = custom_vertex_conditions(g, half, L);
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2) - half;
    CHECK((vc.L - Q * vc.L * Q).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("contact block: continuity projector and strength term") {
    const Eigen::Matrix2d P = contact_projector();
    CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    // ker P is the continuity direction (1,1)
    Eigen::Vector2d cont(1.0, 1.0);
    CHECK((P * cont).cwiseAbs().maxCoeff() < 1e-15);

    const double alpha = 3.0;
    const Eigen::Matrix2d L = contact_l(alpha);
    const Eigen::Matrix2d Q = Eigen::Matrix2d::Identity() - P;
    CHECK((L - Q * L * Q).cwiseAbs().maxCoeff() < 1e-14);
    // quadratic form on the continuity direction: -(alpha/2) |psi+ + psi-|^2 / 2
    CHECK(cont.dot(L * cont) == doctest::Approx(-alpha));
}

TEST_CASE("varying alpha: interpolation, clamping, repulsiveness") {
    ContactSpec cs = ContactSpec::delta_samples({{0.2, 1.0}, {0.8, 3.0}});
    CHECK(cs.alpha(0.5) == doctest::Approx(2.0));
    CHECK(cs.alpha(0.0) == doctest::Approx(1.0));  // clamped
    CHECK(cs.alpha(1.0) == doctest::Approx(3.0));
    CHECK(cs.max_abs_alpha() == doctest::Approx(3.0));
    CHECK(cs.repulsive());
    CHECK_FALSE(cs.alpha_constant());

    ContactSpec attr = ContactSpec::delta_constant(-1.0);
    CHECK_FALSE(attr.repulsive());
    CHECK(ContactSpec::hardcore().repulsive());
    CHECK(ContactSpec::none().repulsive());
}

TEST_CASE("regularity advisories warn without failing validation") {
    const MetricGraph g({"a", "b"}, {{"e", "a", "b", 1.0}});
    const VertexConditions vc = preset_vertex_conditions("kirchhoff", g);

    const ContactSpec flat = ContactSpec::delta_constant(2.0);
    CHECK(check_regularity_hypotheses(vc, flat).empty());

    // varies right up to the endpoint of the diagonal
    const ContactSpec edgy = ContactSpec::delta_samples({{0.0, 0.0}, {1.0, 2.0}});
    CHECK_FALSE(check_regularity_hypotheses(vc, edgy).empty());
    CHECK(validate_pl(vc, edgy, g).pass);
}

}  // namespace
