#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <limits>
#include <vector>

#include "qgraph/errors.hpp"

namespace qgraph {

using SpMat = Eigen::SparseMatrix<double>;

struct EigenRequest {
    int m = 1;
    enum class Mode { Auto, Dense, ShiftInvert };
    Mode mode = Mode::Auto;
    double shift = std::numeric_limits<double>::quiet_NaN();  // NaN: chosen automatically
    double tolerance = 1e-9;
    int max_iterations = 6;  // window retry budget of the Krylov path
    int dense_cap = 4000;
    unsigned seed = 0x5eed1234;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // ascending, with multiplicity
    Eigen::MatrixXd vectors;          // columns, M-orthonormal
    std::vector<double> residuals;    // ||K x - lambda M x|| / ||x||_M
};

/// Lowest-m eigenpairs of K x = lambda M x. Dense mode reduces by a Cholesky
/// factor of M; the Krylov mode runs shift-inverted Lanczos with full
/// M-reorthogonalization, windowed over the spectrum, each window verified
/// against a factorization inertia count, followed by a global Rayleigh-Ritz
/// rotation of all accepted vectors.
EigenResult solve(const SpMat& K, const SpMat& M, const EigenRequest& req);

struct ResidualReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
    double orthonormality_defect = 0.0;  // max entry of |X^T M X - I|
};

/// Recomputes residuals and M-orthonormality independently of the solver path.
ResidualReport residual_check(const SpMat& K, const SpMat& M, const EigenResult& res);

/// Number of eigenvalues of (K, M) strictly below lambda, by the inertia of
/// an LDLT factorization of K - lambda M (with small shift nudges on pivot
/// breakdown).
int inertia_below(const SpMat& K, const SpMat& M, double lambda);

/// Groups ascending eigenvalues into degenerate clusters: consecutive gaps
/// at most rel_tol * max(1, |lambda|).
std::vector<std::vector<int>> eigenvalue_clusters(const std::vector<double>& values,
                                                  double rel_tol = 1e-10);

}  // namespace qgraph
