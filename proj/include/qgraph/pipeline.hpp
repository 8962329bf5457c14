#pragma once

#include "qgraph/assemble.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/graph_spec.hpp"

#include <string>
#include <vector>

namespace qgraph {

enum class Sector { Bose, Fermi, None };

const char* sector_name(Sector s);

struct SpectralResult {
    std::vector<double> eigenvalues;  // ascending
    std::vector<Sector> sectors;
    std::vector<double> residuals;
    double h = 0.0;
    int particle_count = 1;
    Statistics statistics = Statistics::Distinguishable;
    std::string fingerprint;
    // Filled by convergence_study / refinement helpers; empty otherwise.
    std::vector<double> coarse_eigenvalues;
    std::vector<double> richardson;

    int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// 1D network discretization of the vertex-condition form; sectors are "none".
SpectralResult one_particle_spectrum(const MetricGraph& g, const VertexConditions& vc, int m,
                                     double h, EigenRequest::Mode mode = EigenRequest::Mode::Auto);

/// Full pipeline for N=2: dissect, mesh, assemble with distinguishable
/// weights, solve, classify exchange sectors. Bosonic statistics returns the
/// bose-sector sublist (the solve adaptively deepens until m bose levels are
/// resolved).
SpectralResult two_particle_spectrum(const GraphSpec& spec, int m, double h,
                                     EigenRequest::Mode mode = EigenRequest::Mode::Auto);

/// Same pipeline on the three-particle cube of a single-edge graph.
SpectralResult n_particle_spectrum(const GraphSpec& spec, int m, double h,
                                   EigenRequest::Mode mode = EigenRequest::Mode::Auto);

/// Dispatch on spec.particle_count.
SpectralResult compute_spectrum(const GraphSpec& spec, int m, double h,
                                EigenRequest::Mode mode = EigenRequest::Mode::Auto);

/// Per-eigenvector exchange labels. Works cluster by cluster: the permutation
/// action restricted to a degenerate cluster's invariant subspace is split
/// into its +1 (bose) and -1 (fermi) parts; clusters on which the action is
/// not unitary (conditions that break exchange symmetry) get "none".
std::vector<Sector> classify_sectors(const Mesh& mesh, const DiscreteForm& form,
                                     const EigenResult& res);

/// #{n : lambda_n <= lambda}. Levels above the resolved range are rejected.
int counting_function(const SpectralResult& res, double lambda);

enum class WeylTheory { Distinguishable2, Bose2, DistinguishableN, BoseN };

struct WeylFit {
    double fitted_slope = 0.0;
    double theory_slope = 0.0;
    double rel_deviation = 0.0;
    double window_min = 0.0;
    double window_max = 0.0;
    int count = 0;  // eigenvalues inside the fit window
};

/// Least-squares fit of the counting function against c * lambda^(N/2) over
/// the fit window (drops the lowest 5 levels and the top 30% of the resolved
/// list). Requires at least 100 resolved eigenvalues.
WeylFit weyl_fit(const SpectralResult& res, WeylTheory theory, const MetricGraph& g);

struct BracketReport {
    std::vector<double> levels;  // probe levels: the resolved eigenvalues
    std::vector<int> count_dirichlet;
    std::vector<int> count_physical;
    std::vector<int> count_robin;
    int violations = 0;
};

/// Computes Dirichlet and Robin comparison forms on the same mesh and checks
/// the two-sided counting inequality N_D <= N <= N_R at every resolved level.
/// All three counts come from factorization inertia at the same probe value.
BracketReport bracketing_check(const GraphSpec& spec, int m, double h);

struct ConvergenceStudy {
    std::vector<double> h_levels;                  // descending (coarse to fine)
    std::vector<std::vector<double>> eigenvalues;  // one list per level
    std::vector<double> observed_order;            // per tracked eigenvalue
    std::vector<double> richardson;                // from the finest pair
    std::vector<int> flagged;                      // tracked indices with order < 1.5
};

/// Richardson-based observed convergence orders over at least three mesh
/// levels; levels are expected to refine by a fixed ratio.
ConvergenceStudy convergence_study(const GraphSpec& spec, int m,
                                   const std::vector<double>& h_levels);

/// Deterministic text outputs (15 significant digits, no timings).
std::string spectrum_csv(const SpectralResult& res);
std::string weyl_json(const WeylFit& fit);
std::string report_json(const GraphSpec& spec, const SpectralResult& res);
std::string matrix_coordinate_dump(const SpMat& a);

}  // namespace qgraph
