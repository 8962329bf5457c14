#pragma once

#include <Eigen/Sparse>

#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/dissect.hpp"
#include "qgraph/mesh.hpp"

namespace qgraph {

using SpMat = Eigen::SparseMatrix<double>;

/// Form-weight modes.
///
/// Distinguishable: full gradient, every vertex-face term, contact split
/// half/half over the two copies of each diagonal (or over the two sides of
/// each coincidence plane for three particles).
///
/// BosonicReduced: the symmetric-sector form assembled on the same mesh with
/// its explicit prefactors: N times the first-coordinate gradient, N times
/// the first-axis face terms, and N(N-1)/2 times the contact term on a single
/// representative diagonal. Both modes take identical values on
/// exchange-symmetric coefficient vectors.
enum class FormWeights { Distinguishable, BosonicReduced };

enum class ConstraintVariant {
    Physical,             // the given vertex and contact conditions
    DirichletComparison,  // zero on every boundary component, faces and diagonals
    RobinComparison       // no constraints: fully broken space, relaxed boundary term
};

struct EliminationRecord {
    int node = -1;
    const char* reason = "";
};

/// Unconstrained bilinear forms over the raw (per-cell duplicated) nodes.
struct RawForms {
    SpMat gradient;   // weighted broken-gradient form
    SpMat mass;       // volume mass
    SpMat boundary;   // -(vertex L terms) + (delta contact terms)
    SpMat face_mass;  // trace mass over all vertex-face components (Robin bound)
};

RawForms assemble_raw(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                      const VertexConditions& vc, const ContactSpec& cs, FormWeights weights,
                      bool parallel = true);

/// Sparse basis of the constrained subspace: columns span the admissible raw
/// vectors, reduced operators are T^T (raw operator) T. Continuity merges and
/// zero constraints give 0/1 columns; general projector conditions contribute
/// orthonormal kernel-basis blocks confined to the coupled boundary nodes.
struct Reduction {
    SpMat T;
    std::vector<EliminationRecord> eliminated;

    int raw_dim() const { return static_cast<int>(T.rows()); }
    int reduced_dim() const { return static_cast<int>(T.cols()); }
};

Reduction build_reduction(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                          const VertexConditions& vc, const ContactSpec& cs,
                          ConstraintVariant variant);

/// Assembled generalized eigenproblem K x = lambda M x over free coefficients.
struct DiscreteForm {
    SpMat K, M;
    SpMat T;  // raw -> free basis used to build K, M
    RawForms raw;
    std::vector<EliminationRecord> eliminated;
    std::string quadrature;
    std::string contact_measure;

    int dim() const { return static_cast<int>(K.rows()); }
};

DiscreteForm assemble(const MetricGraph& g, const Mesh& mesh, const DissectedDomain& dd,
                      const VertexConditions& vc, const ContactSpec& cs,
                      FormWeights weights = FormWeights::Distinguishable,
                      ConstraintVariant variant = ConstraintVariant::Physical,
                      bool parallel = true);

/// coeffs^T K coeffs.
double form_value(const DiscreteForm& df, const Eigen::VectorXd& coeffs);

/// Free-coefficient bilinear forms S_g = T^T M_raw P_g T of the exchange
/// group, indexed like Mesh::symmetry_nodes. For an M-orthonormal eigenbasis
/// X of a symmetric problem, X^T S_g X is the unitary action of g on the
/// spanned eigenspaces.
std::vector<SpMat> symmetry_forms(const Mesh& mesh, const DiscreteForm& df);

/// One-dimensional one-particle problem on the graph itself.
struct OneParticleForm {
    SpMat K, M, T;
    std::vector<int> edge_subdiv;

    int dim() const { return static_cast<int>(K.rows()); }
};

/// P1 chains per edge with a half consistent, half lumped mass (fourth-order
/// dispersion); vertex conditions imposed by merging, elimination, or
/// kernel-basis reduction of endpoint values, with the L term added as point
/// couplings.
OneParticleForm assemble_one_particle(const MetricGraph& g, const VertexConditions& vc, double h);

}  // namespace qgraph
