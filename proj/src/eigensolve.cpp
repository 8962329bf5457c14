#include "qgraph/eigensolve.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <random>

namespace qgraph {

namespace {

void check_pair(const SpMat& K, const SpMat& M) {
    if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
        throw Error(ErrorCode::DimensionMismatch, "K and M must be square and equal-sized");
}

double trace_of(const SpMat& A) {
    double t = 0.0;
    for (int i = 0; i < A.rows(); ++i) t += A.coeff(i, i);
    return t;
}

bool try_factor(const SpMat& K, const SpMat& M, double sigma,
                Eigen::SimplicialLDLT<SpMat>& ldlt) {
    SpMat A = K - sigma * M;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = ldlt.vectorD();
    const double ma = d.cwiseAbs().maxCoeff();
    if (ma == 0.0) return false;
    return d.cwiseAbs().minCoeff() > 1e-13 * ma;
}

double factor_with_nudge(const SpMat& K, const SpMat& M, double sigma,
                         Eigen::SimplicialLDLT<SpMat>& ldlt) {
    for (int t = 0; t < 8; ++t) {
        const double s = sigma - t * 1e-7 * (1.0 + std::abs(sigma));
        if (try_factor(K, M, s, ldlt)) return s;
    }
    throw Error(ErrorCode::SingularShift, "factorization of K - sigma M failed near sigma");
}

EigenResult finish(const SpMat& K, const SpMat& M, std::vector<double> values,
                   Eigen::MatrixXd vectors) {
    EigenResult res;
    res.eigenvalues = std::move(values);
    res.vectors = std::move(vectors);
    res.residuals.resize(res.eigenvalues.size());
    for (size_t i = 0; i < res.eigenvalues.size(); ++i) {
        const Eigen::VectorXd x = res.vectors.col(static_cast<int>(i));
        const Eigen::VectorXd r = K * x - res.eigenvalues[i] * (M * x);
        const double mn = std::sqrt(std::max(x.dot(M * x), 0.0));
        res.residuals[i] = mn > 0.0 ? r.norm() / mn : r.norm();
    }
    return res;
}

EigenResult solve_dense(const SpMat& K, const SpMat& M, const EigenRequest& req) {
    const int n = static_cast<int>(K.rows());
    {
        Eigen::SimplicialLLT<SpMat> llt(M);
        if (llt.info() != Eigen::Success)
            throw Error(ErrorCode::NotPositiveDefinite, "mass matrix is not positive definite");
    }
    Eigen::MatrixXd Kd(K), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        Kd, Md, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw Error(ErrorCode::NoConvergence, "dense eigensolver failed to converge");
    std::vector<double> vals(req.m);
    Eigen::MatrixXd vecs(n, req.m);
    for (int i = 0; i < req.m; ++i) {
        vals[i] = ges.eigenvalues()(i);
        vecs.col(i) = ges.eigenvectors().col(i);
    }
    return finish(K, M, std::move(vals), std::move(vecs));
}

struct WindowCandidates {
    std::vector<double> lambda;  // ascending, above the window floor
    Eigen::MatrixXd X;
};

/// Shift-inverted Lanczos with full M-reorthogonalization against both the
/// growing basis and the locked (already accepted) vectors. Returns converged
/// Ritz pairs above floor_val, nearest the shift first, sorted ascending.
WindowCandidates lanczos_window(const SpMat& K, const SpMat& M,
                                const Eigen::SimplicialLDLT<SpMat>& ldlt, double sigma,
                                double floor_val, int want, int basis_cap, std::mt19937& rng,
                                const Eigen::MatrixXd& locked) {
    const int n = static_cast<int>(K.rows());
    want = std::max(want, 1);
    basis_cap = std::min(basis_cap, n);
    Eigen::MatrixXd V(n, basis_cap);
    std::vector<double> alpha, beta;  // beta[j] couples v_j and v_{j+1}

    std::normal_distribution<double> gauss(0.0, 1.0);
    auto m_orth = [&](Eigen::VectorXd& w, int cols) {
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd Mw = M * w;
            if (locked.cols() > 0) w -= locked * (locked.transpose() * Mw);
            if (cols > 0) {
                Mw = M * w;
                w -= V.leftCols(cols) * (V.leftCols(cols).transpose() * Mw);
            }
        }
    };
    auto fresh_direction = [&](int cols) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = gauss(rng);
        m_orth(w, cols);
        const double nm = std::sqrt(std::max(w.dot(M * w), 0.0));
        if (nm > 0.0) w /= nm;
        return w;
    };

    V.col(0) = fresh_direction(0);
    int j = 0;
    auto extract = [&](int steps) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
        for (int i = 0; i < steps; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        return es;
    };

    int converged = 0;
    int steps_done = 0;
    const double beta_floor = 1e-13;
    for (j = 0; j < basis_cap; ++j) {
        Eigen::VectorXd w = ldlt.solve(M * V.col(j));
        const double a = w.dot(M * V.col(j));
        alpha.push_back(a);
        w -= a * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        m_orth(w, j + 1);
        double b = std::sqrt(std::max(w.dot(M * w), 0.0));
        steps_done = j + 1;
        if (j + 1 < basis_cap) {
            if (b < beta_floor) {
                // Invariant subspace exhausted; restart in the complement.
                V.col(j + 1) = fresh_direction(j + 1);
                beta.push_back(0.0);
            } else {
                V.col(j + 1) = w / b;
                beta.push_back(b);
            }
        } else {
            beta.push_back(b);
        }

        if (steps_done >= want + 8 && steps_done % 8 == 0) {
            auto es = extract(steps_done);
            converged = 0;
            const double tnorm = es.eigenvalues().cwiseAbs().maxCoeff();
            for (int i = 0; i < steps_done; ++i) {
                const double theta = es.eigenvalues()(i);
                if (std::abs(theta) < 1e-300) continue;
                const double resid = std::abs(beta[steps_done - 1] *
                                              es.eigenvectors()(steps_done - 1, i));
                if (resid > 1e-11 * std::max(tnorm, std::abs(theta))) continue;
                if (sigma + 1.0 / theta > floor_val) ++converged;
            }
            if (converged >= want) break;
        }
    }

    auto es = extract(steps_done);
    WindowCandidates out;
    std::vector<std::pair<double, int>> picks;
    const double tnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    for (int i = 0; i < steps_done; ++i) {
        const double theta = es.eigenvalues()(i);
        if (std::abs(theta) < 1e-300) continue;
        const double resid =
            std::abs(beta[steps_done - 1] * es.eigenvectors()(steps_done - 1, i));
        if (resid > 1e-10 * std::max(tnorm, std::abs(theta))) continue;
        const double lam = sigma + 1.0 / theta;
        if (lam <= floor_val) continue;
        picks.emplace_back(lam, i);
    }
    std::sort(picks.begin(), picks.end());
    out.lambda.resize(picks.size());
    out.X.resize(n, static_cast<int>(picks.size()));
    for (size_t p = 0; p < picks.size(); ++p) {
        out.lambda[p] = picks[p].first;
        out.X.col(static_cast<int>(p)) =
            V.leftCols(steps_done) * es.eigenvectors().col(picks[p].second).head(steps_done);
    }
    return out;
}

EigenResult solve_shift_invert(const SpMat& K, const SpMat& M, const EigenRequest& req) {
    const int n = static_cast<int>(K.rows());
    const int m = req.m;
    {
        Eigen::SimplicialLLT<SpMat> llt(M);
        if (llt.info() != Eigen::Success)
            throw Error(ErrorCode::NotPositiveDefinite, "mass matrix is not positive definite");
    }
    std::mt19937 rng(req.seed);

    double sigma0 = std::isnan(req.shift)
                        ? -0.1 * std::abs(trace_of(K)) / std::max(trace_of(M), 1e-300)
                        : req.shift;
    double spread = 1.0 + std::abs(sigma0);
    for (int k = 0; k < 64 && inertia_below(K, M, sigma0) > 0; ++k) {
        sigma0 -= spread;
        spread *= 2.0;
    }

    std::vector<double> acc;
    Eigen::MatrixXd X(n, 0);
    double a = sigma0;
    int count_a = 0;

    const bool debug = std::getenv("QGRAPH_EIG_DEBUG") != nullptr;
    while (static_cast<int>(acc.size()) < m) {
        const int want = std::min(m - static_cast<int>(acc.size()), 96);
        int cap = std::min(n, std::max(3 * want + 40, 80));

        bool advanced = false;
        std::vector<double> found;
        Eigen::MatrixXd foundX(n, 0);
        double sigma_target = a;
        for (int attempt = 0; attempt < std::max(req.max_iterations, 1); ++attempt) {
            Eigen::SimplicialLDLT<SpMat> ldlt;
            const double sigma = factor_with_nudge(K, M, sigma_target, ldlt);
            Eigen::MatrixXd locked(n, X.cols() + foundX.cols());
            locked << X, foundX;
            const int missing = std::max(4, want - static_cast<int>(found.size()));
            WindowCandidates wc =
                lanczos_window(K, M, ldlt, sigma, a, missing, cap, rng, locked);
            if (debug)
                std::fprintf(stderr,
                             "[eig] acc=%zu want=%d attempt=%d sigma=%.6g cap=%d new=%zu\n",
                             acc.size(), want, attempt, sigma, cap, wc.lambda.size());
            // Merge this attempt's pairs with the window's previous finds.
            std::vector<std::pair<double, int>> order;
            for (size_t i = 0; i < found.size(); ++i)
                order.emplace_back(found[i], static_cast<int>(i));
            for (size_t i = 0; i < wc.lambda.size(); ++i)
                order.emplace_back(wc.lambda[i], -1 - static_cast<int>(i));
            std::sort(order.begin(), order.end());
            std::vector<double> merged;
            Eigen::MatrixXd mergedX(n, static_cast<int>(order.size()));
            for (size_t i = 0; i < order.size(); ++i) {
                merged.push_back(order[i].first);
                mergedX.col(static_cast<int>(i)) =
                    order[i].second >= 0 ? foundX.col(order[i].second)
                                         : wc.X.col(-1 - order[i].second);
            }
            found = std::move(merged);
            foundX = std::move(mergedX);

            // Accept the longest verifiable candidate prefix. Probes sit only
            // at cluster boundaries so they never land inside an exactly
            // degenerate group; a boundary just past `want` is allowed so a
            // degenerate cluster straddling the chunk edge can be taken
            // whole. Verification failures come from eigenvalues the Krylov
            // run has not found yet, so success is monotone in the prefix
            // length and a binary search over boundaries finds the longest.
            std::vector<int> bounds;
            for (const auto& c : eigenvalue_clusters(found)) {
                bounds.push_back(c.back() + 1);
                if (c.back() + 1 > want) break;
            }
            auto probe_at = [&](int p) {
                return found[p - 1] + std::max(1e-12, 1e-9 * std::abs(found[p - 1]));
            };
            int best = -1, best_cb = 0;
            int lo = 0, hi = static_cast<int>(bounds.size()) - 1;
            while (lo <= hi) {
                const int mid = (lo + hi + 1) / 2;
                const int p = bounds[mid];
                const int cb = inertia_below(K, M, probe_at(p));
                if (debug)
                    std::fprintf(stderr, "[eig]   verify t=%d b=%.9g cb=%d expect=%d\n", p,
                                 probe_at(p), cb, count_a + p);
                if (cb == count_a + p) {
                    best = mid;
                    best_cb = cb;
                    lo = mid + 1;
                } else {
                    hi = mid - 1;
                }
            }
            if (best >= 0) {
                const int t = bounds[best];
                Eigen::MatrixXd X2(n, X.cols() + t);
                X2 << X, foundX.leftCols(t);
                X = std::move(X2);
                acc.insert(acc.end(), found.begin(), found.begin() + t);
                a = probe_at(t);
                count_a = best_cb;
                advanced = true;
            }
            if (advanced) break;
            cap = std::min(n, cap + cap / 2 + 16);
            // Re-center the shift on the eigenvalues still being hunted; the
            // frontier value a can sit far below them (notably at startup).
            if (!found.empty()) {
                const int k = std::min<int>(want, static_cast<int>(found.size()));
                if (static_cast<int>(found.size()) >= want)
                    sigma_target = 0.5 * (found[0] + found[k - 1]);
                else
                    sigma_target =
                        found.back() +
                        std::max(1e-3 * (1.0 + std::abs(found.back())),
                                 found.back() - found.front());
            }
        }
        if (!advanced)
            throw Error(ErrorCode::NoConvergence,
                        "Krylov windows failed to verify against the inertia count");
    }

    // Global Rayleigh-Ritz rotation: cross-window M-orthonormality and
    // variationally optimal values on the accepted subspace.
    Eigen::MatrixXd A = X.transpose() * (K * X).eval();
    Eigen::MatrixXd B = X.transpose() * (M * X).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        0.5 * (A + A.transpose()), 0.5 * (B + B.transpose()),
        Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw Error(ErrorCode::NoConvergence, "final Rayleigh-Ritz rotation failed");
    std::vector<double> vals(m);
    Eigen::MatrixXd vecs(n, m);
    for (int i = 0; i < m; ++i) {
        vals[i] = ges.eigenvalues()(i);
        vecs.col(i) = X * ges.eigenvectors().col(i);
    }
    return finish(K, M, std::move(vals), std::move(vecs));
}

}  // namespace

EigenResult solve(const SpMat& K, const SpMat& M, const EigenRequest& req) {
    check_pair(K, M);
    const int n = static_cast<int>(K.rows());
    if (req.m < 1) throw Error(ErrorCode::ValidationError, "eigenpair count must be positive");
    if (req.m > n)
        throw Error(ErrorCode::TooFewEigenvalues,
                    "requested more eigenpairs than degrees of freedom");

    EigenRequest::Mode mode = req.mode;
    if (mode == EigenRequest::Mode::Auto)
        mode = n <= std::min(req.dense_cap, 900) ? EigenRequest::Mode::Dense
                                                 : EigenRequest::Mode::ShiftInvert;
    if (mode == EigenRequest::Mode::Dense) {
        if (n > req.dense_cap)
            throw Error(ErrorCode::ValidationError,
                        "problem size exceeds the dense-mode cap");
        return solve_dense(K, M, req);
    }
    return solve_shift_invert(K, M, req);
}

ResidualReport residual_check(const SpMat& K, const SpMat& M, const EigenResult& res) {
    check_pair(K, M);
    ResidualReport rep;
    const int m = static_cast<int>(res.eigenvalues.size());
    rep.residuals.resize(m);
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd x = res.vectors.col(i);
        const Eigen::VectorXd r = K * x - res.eigenvalues[i] * (M * x);
        const double mn = std::sqrt(std::max(x.dot(M * x), 0.0));
        rep.residuals[i] = mn > 0.0 ? r.norm() / mn : r.norm();
        rep.max_residual = std::max(rep.max_residual, rep.residuals[i]);
    }
    const Eigen::MatrixXd G = res.vectors.transpose() * (M * res.vectors).eval();
    rep.orthonormality_defect =
        (G - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
    return rep;
}

int inertia_below(const SpMat& K, const SpMat& M, double lambda) {
    check_pair(K, M);
    if (K.rows() == 0) return 0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double lam = lambda + attempt * 1e-9 * (1.0 + std::abs(lambda));
        SpMat A = K - lam * M;
        Eigen::SimplicialLDLT<SpMat> ldlt(A);
        if (ldlt.info() != Eigen::Success) continue;
        const Eigen::VectorXd d = ldlt.vectorD();
        const double ma = d.cwiseAbs().maxCoeff();
        if (ma == 0.0) return 0;
        if (d.cwiseAbs().minCoeff() <= 1e-13 * ma && attempt < 5) continue;
        int neg = 0;
        for (int i = 0; i < d.size(); ++i)
            if (d(i) < 0.0) ++neg;
        return neg;
    }
    throw Error(ErrorCode::SingularShift, "inertia count hit repeated pivot breakdowns");
}

std::vector<std::vector<int>> eigenvalue_clusters(const std::vector<double>& values,
                                                  double rel_tol) {
    std::vector<std::vector<int>> clusters;
    for (size_t i = 0; i < values.size(); ++i) {
        const bool extend =
            !clusters.empty() &&
            values[i] - values[clusters.back().back()] <=
                rel_tol * std::max(1.0, std::abs(values[i]));
        if (extend)
            clusters.back().push_back(static_cast<int>(i));
        else
            clusters.push_back({static_cast<int>(i)});
    }
    return clusters;
}

}  // namespace qgraph
