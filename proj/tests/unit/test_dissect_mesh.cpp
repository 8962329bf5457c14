#include "doctest.h"
#include "qgraph/mesh.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace {

using namespace qgraph;

MetricGraph chain(int edges) {
    std::vector<std::string> verts;
    std::vector<Edge> es;
    for (int v = 0; v <= edges; ++v) verts.push_back("v" + std::to_string(v));
    for (int e = 0; e < edges; ++e)
        es.push_back({"e" + std::to_string(e), verts[e], verts[e + 1], 1.0 + 0.5 * e});
    return MetricGraph(std::move(verts), std::move(es));
}

MetricGraph ring(double l) { return MetricGraph({"v"}, {{"loop", "v", "v", l}}); }

TEST_CASE("two-particle dissection: cell counts, measure, exchange") {
    for (int E = 1; E <= 3; ++E) {
        const MetricGraph g = chain(E);
        const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);
        // each same-edge square splits in two; distinct ordered pairs stay whole
        CHECK(static_cast<int>(dd.cells.size()) == E * E + E);
        const double L = total_length(g);
        CHECK(dd.total_measure == doctest::Approx(L * L).epsilon(1e-12));

        double sum = 0.0;
        for (const Cell& c : dd.cells) sum += c.measure;
        CHECK(sum == doctest::Approx(dd.total_measure).epsilon(1e-12));

        // exchange is an involution pairing the two triangles of each square
        for (size_t i = 0; i < dd.cells.size(); ++i) {
            const int j = dd.exchange_cell[i];
            CHECK(dd.exchange_cell[j] == static_cast<int>(i));
            if (dd.cells[i].kind == Cell::Kind::TrianglePlus)
                CHECK(dd.cells[j].kind == Cell::Kind::TriangleMinus);
        }
    }
}

TEST_CASE("diagonal traces pair the two sides of each cut") {
    const MetricGraph g = chain(2);
    const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);
    for (int e = 0; e < g.num_edges(); ++e) {
        const DiagonalTrace tr = diagonal_trace(dd, e);
        CHECK(tr.length == doctest::Approx(g.edge(e).length));
        CHECK(dd.cells[tr.plus_cell].kind == Cell::Kind::TrianglePlus);
        CHECK(dd.cells[tr.minus_cell].kind == Cell::Kind::TriangleMinus);
        const CellFacet& f = dd.cells[tr.plus_cell].facets[tr.plus_facet];
        CHECK(f.tag == CellFacet::Tag::Diagonal);
        CHECK(f.paired_cell == tr.minus_cell);
    }
}

TEST_CASE("three particles: order simplices of the cube, single edge only") {
    const MetricGraph g = ring(2.0);
    const DissectedDomain dd = dissect(g, 3, Statistics::Distinguishable);
    CHECK(dd.cells.size() == 6);
    CHECK(dd.total_measure == doctest::Approx(8.0).epsilon(1e-12));
    for (const Cell& c : dd.cells) CHECK(c.kind == Cell::Kind::Simplex);

    CHECK_THROWS_AS(dissect(chain(2), 3, Statistics::Distinguishable), Error);
    // four-particle dissection is combinatorial only; meshing rejects it
    const DissectedDomain dd4 = dissect(ring(1.0), 4, Statistics::Distinguishable);
    CHECK(dd4.cells.size() == 24);
    CHECK_THROWS_AS(build_mesh(dd4, 0.25), Error);
}

TEST_CASE("subdivision counts guard against near-integer ratios") {
    CHECK(subdivisions_for(1.0, 0.5) == 2);
    CHECK(subdivisions_for(1.0, 0.3) == 4);
    // floating-point noise below the guard must not add a spurious interval
    CHECK(subdivisions_for(1.0, 1.0 / 3.0 * (1.0 - 1e-13)) == 3);
    CHECK_THROWS_AS(subdivisions_for(1.0, 0.0), Error);
    CHECK_THROWS_AS(subdivisions_for(1.0, -0.1), Error);
}

TEST_CASE("unit-square mesh at h = 1/2: counts and symmetry action") {
    const MetricGraph g({"a", "b"}, {{"e", "a", "b", 1.0}});
    const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);
    const Mesh mesh = build_mesh(dd, 0.5);
    // two triangular cells, each carrying a 3x3 corner grid's triangular half
    CHECK(mesh.elements.size() == 8);
    CHECK(mesh.num_nodes() == 12);  // 6 per triangle, diagonal nodes duplicated
    CHECK(mesh.edge_subdiv[0] == 2);

    REQUIRE(mesh.symmetry_nodes.size() == 2);
    const auto& swap = mesh.symmetry_nodes[1];
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        CHECK(mesh.coords[swap[i]][0] == doctest::Approx(mesh.coords[i][1]));
        CHECK(mesh.coords[swap[i]][1] == doctest::Approx(mesh.coords[i][0]));
        CHECK(swap[swap[i]] == i);
    }
}

TEST_CASE("mesh node budget is enforced") {
    const MetricGraph g = ring(1.0);
    const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);
    CHECK_THROWS_AS(build_mesh(dd, 1e-4, 1000), Error);
    try {
        build_mesh(dd, 1e-4, 1000);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MeshTooFine);
    }
}

TEST_CASE("diagonal chains are ordered by the trace parameter") {
    const MetricGraph g = ring(2.0);
    const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);
    const Mesh mesh = build_mesh(dd, 0.25);
    const BoundaryLayout& layout = dd.layout;
    for (int comp = 0; comp < layout.contact_dim; ++comp) {
        const auto& nodes = mesh.component_nodes[comp];
        REQUIRE(nodes.size() >= 2);
        double prev = -1.0;
        for (int nd : nodes) {
            const double x = mesh.coords[nd][0];
            CHECK(mesh.coords[nd][1] == doctest::Approx(x));  // on the diagonal
            CHECK(x > prev);
            prev = x;
        }
    }
}

}  // namespace
