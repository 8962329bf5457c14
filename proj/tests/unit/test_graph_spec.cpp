#include "doctest.h"
#include "qgraph/graph_spec.hpp"

#include <cmath>
#include <functional>

namespace {

using namespace qgraph;

const double kPi = 3.14159265358979323846;

MetricGraph interval(double l = kPi) { return MetricGraph({"a", "b"}, {{"e", "a", "b", l}}); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    REQUIRE(false);
    return ErrorCode::IoError;
}

TEST_CASE("metric graph validates its construction data") {
    CHECK(code_of([] { MetricGraph({}, {}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { MetricGraph({"a"}, {}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { MetricGraph({"a", "a"}, {{"e", "a", "a", 1.0}}); }) ==
          ErrorCode::ValidationError);
    CHECK(code_of([] { MetricGraph({"a"}, {{"e", "a", "b", 1.0}}); }) ==
          ErrorCode::ValidationError);
    CHECK(code_of([] { MetricGraph({"a"}, {{"e", "a", "a", 0.0}}); }) ==
          ErrorCode::ValidationError);
    CHECK(code_of([] { MetricGraph({"a"}, {{"e", "a", "a", 1.0}, {"e", "a", "a", 2.0}}); }) ==
          ErrorCode::ValidationError);
}

TEST_CASE("graph accessors: lookup, degree, length") {
    MetricGraph g({"v"}, {{"loop", "v", "v", 2.0}, {"tail", "v", "v", 3.0}});
    CHECK(g.num_vertices() == 1);
    CHECK(g.num_edges() == 2);
    CHECK(g.edge_index("tail") == 1);
    CHECK(g.edge_index("nope") == -1);
    CHECK(g.vertex_index("v") == 0);
    CHECK(g.degree(0) == 4);  // two loops, each counted twice
    CHECK(total_length(g) == doctest::Approx(5.0));
    CHECK(g.is_connected());
}

TEST_CASE("spec parse and serialize round-trip is a fixed point") {
    const char* text = R"({
      "vertices": ["v"],
      "edges": [{"id": "loop", "from": "v", "to": "v", "length": 6.283185307179586}],
      "particles": {"n": 2, "statistics": "bosonic"},
      "vertex_conditions": "kirchhoff",
      "contact": {"type": "delta", "alpha": 2.0}
    })";
    GraphSpec spec = parse_graph_spec(text);
    CHECK(spec.particle_count == 2);
    CHECK(spec.statistics == Statistics::Bosonic);
    CHECK(spec.contact.kind == ContactSpec::Kind::Delta);
    CHECK(spec.contact.alpha(0.3) == doctest::Approx(2.0));

    const std::string once = serialize_graph_spec(spec);
    const std::string twice = serialize_graph_spec(parse_graph_spec(once));
    CHECK(once == twice);
    CHECK(fingerprint(spec) == fingerprint(parse_graph_spec(once)));
}

TEST_CASE("fingerprint separates different problems") {
    GraphSpec a(interval()), b(interval());
    a.contact = ContactSpec::delta_constant(1.0);
    b.contact = ContactSpec::delta_constant(2.0);
    a.particle_count = b.particle_count = 2;
    CHECK(fingerprint(a) != fingerprint(b));
}

TEST_CASE("schema violations carry the schema error code") {
    CHECK(code_of([] { parse_graph_spec("not json"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_graph_spec("[1,2]"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] { parse_graph_spec(R"({"vertices": ["a"]})"); }) == ErrorCode::SchemaError);
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a"}]})");
    }) == ErrorCode::SchemaError);
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a", "length": 1.0}],
            "particles": {"n": 2, "statistics": "anyonic"}})");
    }) == ErrorCode::SchemaError);
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a", "length": 1.0}],
            "contact": {"type": "delta", "alpha": [[0.0]]}})");
    }) == ErrorCode::SchemaError);
}

TEST_CASE("semantic violations carry the validation error code") {
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a", "length": -1.0}]})");
    }) == ErrorCode::ValidationError);
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a", "length": 1.0}],
            "particles": {"n": 1, "statistics": "bosonic"}})");
    }) == ErrorCode::ValidationError);
    CHECK(code_of([] {
        parse_graph_spec(R"({"vertices": ["a"],
            "edges": [{"id": "e", "from": "a", "to": "a", "length": 1.0}],
            "vertex_conditions": "robin"})");
    }) == ErrorCode::UnknownPreset);
}

TEST_CASE("per-vertex and explicit conditions resolve") {
    MetricGraph g({"c", "t"}, {{"e", "c", "t", 1.0}});
    GraphSpec spec(g);
    spec.vertex_conditions.kind = VertexConditionInput::Kind::PerVertex;
    spec.vertex_conditions.per_vertex["c"] = {"delta_vertex", 2.5};
    spec.vertex_conditions.per_vertex["t"] = {"dirichlet", 0.0};
    const VertexConditions vc = spec.resolve_vertex_conditions();
    CHECK(validate_pl(vc, ContactSpec::none(), g).pass);

    GraphSpec ex(g);
    ex.vertex_conditions.kind = VertexConditionInput::Kind::Explicit;
    ex.vertex_conditions.P = Eigen::MatrixXd::Identity(2, 2);
    ex.vertex_conditions.L = Eigen::MatrixXd::Zero(2, 2);
    CHECK(ex.resolve_vertex_conditions().P.isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

}  // namespace
