#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

/// One entry of the boundary-value vector.
///
/// Cell conventions within a hyperrectangle:
///   N=2 same-edge squares: cell 0 = plus triangle {0<y<x<l}, cell 1 = minus
///   triangle {0<x<y<l}; rectangles (distinct edges) have the single cell 0.
///   N>=3 (single edge): cell = lexicographic rank of the ordering permutation
///   sigma, the cell being the region x_{sigma(0)} < ... < x_{sigma(N-1)}.
struct LayoutComponent {
    std::vector<int> edges;         // particle index -> edge carrying that coordinate
    int cell = 0;

    enum class Kind { VertexFace, Diagonal };
    Kind kind = Kind::VertexFace;

    int axis = 0;                   // VertexFace: the clamped particle coordinate.
                                    // Diagonal: plane between sorted positions axis, axis+1
                                    //   (always 0 for N=2).
    int side = 0;                   // VertexFace: 0 (coordinate 0) or 1 (coordinate l).
                                    // Diagonal: 0 = plus/lower-rank cell side, 1 = other side.
    int vertex = -1;                // graph vertex met by a vertex face
    double value_scale = 1.0;       // factor on trace values in the boundary vector
    double derivative_scale = 1.0;  // factor on inward normal derivatives
};

/// Ordered decomposition of boundary-value space: the contact (diagonal)
/// components come first, then the vertex-face components.
struct BoundaryLayout {
    int particle_count = 2;
    Statistics statistics = Statistics::Distinguishable;
    int contact_dim = 0;
    std::vector<LayoutComponent> components;

    int dim() const { return static_cast<int>(components.size()); }
    int vertex_dim() const { return dim() - contact_dim; }
};

BoundaryLayout build_layout(const MetricGraph& g, int particle_count, Statistics statistics);

/// Vertex conditions as one-particle maps P, L on C^{2E} in the endpoint-slot
/// basis (slot 2e+side). P is an orthogonal projector; L is self-adjoint and
/// stored compressed to ker P (L = QLQ with Q = 1-P). Optional y-dependent
/// samples describe maps that vary along the spectator coordinate; assembly
/// supports only the y-independent case.
struct VertexConditions {
    std::string preset = "custom";  // kirchhoff | dirichlet | neumann | delta_vertex | custom
    double strength = 0.0;          // delta_vertex coupling
    Eigen::MatrixXd P, L;

    std::vector<double> y_grid;
    std::vector<Eigen::MatrixXd> P_samples, L_samples;
    bool y_dependent() const { return !y_grid.empty(); }
};

VertexConditions preset_vertex_conditions(const std::string& name, const MetricGraph& g,
                                          double strength = 0.0);

struct PerVertexEntry {
    std::string preset;
    double strength = 0.0;
};

VertexConditions per_vertex_conditions(const MetricGraph& g,
                                       const std::map<std::string, PerVertexEntry>& entries,
                                       const std::string& default_preset = "kirchhoff");

/// Validates P and compresses L to ker P.
VertexConditions custom_vertex_conditions(const MetricGraph& g, Eigen::MatrixXd P,
                                          Eigen::MatrixXd L, double tol = 1e-12);

/// Two-particle contact interaction on the diagonals.
struct ContactSpec {
    enum class Kind { None, Delta, Hardcore };
    Kind kind = Kind::None;

    bool alpha_scalar = true;                          // input was a single constant
    std::vector<std::array<double, 2>> alpha_samples;  // (y, value), y ascending in [0,1]

    static ContactSpec none();
    static ContactSpec delta_constant(double alpha);
    static ContactSpec delta_samples(std::vector<std::array<double, 2>> samples);
    static ContactSpec hardcore();

    /// Piecewise-linear interpolation of the samples, clamped outside [y0, y_last].
    double alpha(double y) const;
    double max_abs_alpha() const;
    bool repulsive() const;  // all samples >= 0 (vacuously true for none/hardcore)
    bool alpha_constant(double tol = 0.0) const;
};

/// The contact block of the projector: ker is spanned by (1,1)/sqrt(2), so
/// P psi_bv = 0 is the continuity condition psi+ = psi- on the diagonal.
Eigen::Matrix2d contact_projector();
Eigen::Matrix2d contact_l(double alpha);

struct ValidationReport {
    bool pass = true;
    double projector_defect = 0.0;      // max of ||P*P-P||, ||P-P^T|| over samples
    double l_selfadjoint_defect = 0.0;  // max ||L-L^T||
    double l_kernel_defect = 0.0;       // max ||L-QLQ||
    std::vector<std::string> failures;
};

/// Checks one (P, L) pair; used by validate_pl on every sample.
ValidationReport validate_projector_pair(const Eigen::MatrixXd& P, const Eigen::MatrixXd& L,
                                         double tol = 1e-12);

ValidationReport validate_pl(const VertexConditions& vc, const ContactSpec& cs,
                             const MetricGraph& g, double tol = 1e-12);

/// Advisory only: warns when the hypotheses backing clean eigenvalue
/// convergence are not met (alpha varying near the endpoints, vertex maps
/// varying near the endpoints, kinked samples).
std::vector<std::string> check_regularity_hypotheses(const VertexConditions& vc,
                                                     const ContactSpec& cs);

/// Structure of the one-particle conditions as seen by the assembler.
enum class VertexKind { Continuity, Dirichlet, Neumann, Custom };

struct VertexConditionAnalysis {
    bool vertex_local = true;        // P, L block-diagonal over vertex slot groups
    std::vector<VertexKind> kinds;   // per vertex (valid when vertex_local)
    std::vector<double> strengths;   // delta_vertex strength per vertex (0 otherwise)
};

VertexConditionAnalysis analyze_vertex_conditions(const VertexConditions& vc,
                                                  const MetricGraph& g, double tol = 1e-12);

/// Lift of the one-particle maps to the vertex block of a distinguishable
/// two-particle layout: block-diagonal in (trace direction, spectator edge).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lift_vertex_conditions(const VertexConditions& vc,
                                                                   const MetricGraph& g,
                                                                   const BoundaryLayout& layout);

/// max_y of the operator norm of the full L(y) (vertex plus contact blocks);
/// the Robin comparison operator places this value on every vertex component.
double robin_lambda_bar(const VertexConditions& vc, const ContactSpec& cs);

}  // namespace qgraph
