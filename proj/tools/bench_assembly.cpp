// Serial vs OpenMP assembly timing on a two-particle interval problem.
#include "qgraph/assemble.hpp"

#include <chrono>
#include <cstdio>

using namespace qgraph;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool identical(const SpMat& a, const SpMat& b) {
    if (a.rows() != b.rows() || a.nonZeros() != b.nonZeros()) return false;
    SpMat d = a - b;
    return d.coeffs().cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

int main() {
    const MetricGraph g({"a", "b"}, {{"e", "a", "b", 3.14159265358979323846}});
    const VertexConditions vc = preset_vertex_conditions("neumann", g);
    const ContactSpec cs = ContactSpec::delta_constant(1.0);
    const DissectedDomain dd = dissect(g, 2, Statistics::Distinguishable);

    std::printf("%10s %10s %12s %12s %9s %10s\n", "h", "nodes", "serial_ms", "parallel_ms",
                "speedup", "identical");
    for (double h : {0.02, 0.01, 0.005}) {
        const Mesh mesh = build_mesh(dd, h);

        auto t0 = std::chrono::steady_clock::now();
        const RawForms serial = assemble_raw(g, mesh, dd, vc, cs,
                                             FormWeights::Distinguishable, false);
        const double t_serial = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        const RawForms parallel = assemble_raw(g, mesh, dd, vc, cs,
                                               FormWeights::Distinguishable, true);
        const double t_parallel = ms_since(t0);

        const bool same = identical(serial.gradient, parallel.gradient) &&
                          identical(serial.mass, parallel.mass) &&
                          identical(serial.boundary, parallel.boundary);
        std::printf("%10.4f %10d %12.2f %12.2f %9.2f %10s\n", h, mesh.num_nodes(), t_serial,
                    t_parallel, t_serial / t_parallel, same ? "yes" : "NO");
        if (!same) return 1;
    }
    return 0;
}
