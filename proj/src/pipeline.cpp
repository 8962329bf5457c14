#include "qgraph/pipeline.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace qgraph {

namespace {

using nlohmann::json;

struct AssembledProblem {
    DissectedDomain dd;
    Mesh mesh;
    DiscreteForm form;
};

VertexConditions resolve_and_validate(const GraphSpec& spec) {
    VertexConditions vc = spec.resolve_vertex_conditions();
    ValidationReport rep = validate_pl(vc, spec.contact, spec.graph);
    if (!rep.pass)
        throw Error(ErrorCode::ValidationError, rep.failures.front());
    return vc;
}

AssembledProblem assemble_problem(const GraphSpec& spec, const VertexConditions& vc, double h,
                                  ConstraintVariant variant = ConstraintVariant::Physical) {
    // Meshing always uses the distinguishable dissection; exchange statistics
    // act spectrally through sector classification.
    AssembledProblem p{dissect(spec.graph, spec.particle_count, Statistics::Distinguishable),
                       Mesh{}, DiscreteForm{}};
    p.mesh = build_mesh(p.dd, h);
    p.form = assemble(spec.graph, p.mesh, p.dd, vc, spec.contact,
                      FormWeights::Distinguishable, variant);
    return p;
}

/// Solves for at least m pairs, deepening until the cluster containing index
/// m-1 is complete (so downstream sector splits never see a truncated
/// degenerate cluster).
EigenResult solve_padded(const SpMat& K, const SpMat& M, int m, EigenRequest::Mode mode) {
    const int n = static_cast<int>(K.rows());
    if (m > n)
        throw Error(ErrorCode::TooFewEigenvalues,
                    "requested more eigenpairs than degrees of freedom");
    int ms = std::min(n, m + 8);
    for (;;) {
        EigenRequest req;
        req.m = ms;
        req.mode = mode;
        EigenResult res = solve(K, M, req);
        if (ms >= n) return res;
        const auto clusters = eigenvalue_clusters(res.eigenvalues);
        bool complete = true;
        for (const auto& c : clusters)
            if (c.front() <= m - 1 && m - 1 <= c.back() && c.back() == ms - 1) complete = false;
        if (complete) return res;
        ms = std::min(n, ms + std::max(16, ms / 4));
    }
}

/// Number of leading entries lying in complete clusters; a trailing cluster
/// that touches the end of a partial solve is excluded.
int complete_prefix(const EigenResult& res, int full_dim) {
    const int n = static_cast<int>(res.eigenvalues.size());
    if (n == 0 || n == full_dim) return n;
    const auto clusters = eigenvalue_clusters(res.eigenvalues);
    const auto& last = clusters.back();
    return last.back() == n - 1 ? last.front() : n;
}

std::vector<int> lex_permutations(int n) {
    // flattened list of the n! permutations of {0..n-1} in lexicographic order
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    std::vector<int> flat;
    do {
        flat.insert(flat.end(), base.begin(), base.end());
    } while (std::next_permutation(base.begin(), base.end()));
    return flat;
}

int permutation_sign(const int* p, int n) {
    int inv = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

SpectralResult spectrum_nd(const GraphSpec& spec, int m, double h, EigenRequest::Mode mode) {
    if (m < 1) throw Error(ErrorCode::ValidationError, "eigenvalue count must be positive");
    const VertexConditions vc = resolve_and_validate(spec);
    AssembledProblem p = assemble_problem(spec, vc, h);
    const int n = p.form.dim();

    SpectralResult out;
    out.h = h;
    out.particle_count = spec.particle_count;
    out.statistics = spec.statistics;
    out.fingerprint = fingerprint(spec);

    if (spec.statistics == Statistics::Distinguishable) {
        EigenResult res = solve_padded(p.form.K, p.form.M, m, mode);
        std::vector<Sector> labels = classify_sectors(p.mesh, p.form, res);
        out.eigenvalues.assign(res.eigenvalues.begin(), res.eigenvalues.begin() + m);
        out.sectors.assign(labels.begin(), labels.begin() + m);
        out.residuals.assign(res.residuals.begin(), res.residuals.begin() + m);
        return out;
    }

    // Bosonic: filter the bose sector of the distinguishable problem,
    // deepening until m bose levels lie in complete clusters.
    int factorial = 1;
    for (int i = 2; i <= spec.particle_count; ++i) factorial *= i;
    int want = std::min(n, factorial * m + 16);
    for (;;) {
        EigenResult res = solve_padded(p.form.K, p.form.M, want, mode);
        std::vector<Sector> labels = classify_sectors(p.mesh, p.form, res);
        const int usable = complete_prefix(res, n);
        std::vector<int> bose;
        for (int i = 0; i < usable; ++i)
            if (labels[i] == Sector::Bose) bose.push_back(i);
        if (static_cast<int>(bose.size()) >= m) {
            for (int j = 0; j < m; ++j) {
                out.eigenvalues.push_back(res.eigenvalues[bose[j]]);
                out.sectors.push_back(Sector::Bose);
                out.residuals.push_back(res.residuals[bose[j]]);
            }
            return out;
        }
        if (want >= n)
            throw Error(ErrorCode::TooFewEigenvalues,
                        "the discretization resolves fewer bose levels than requested");
        want = std::min(n, 2 * want);
    }
}

double theory_slope_for(WeylTheory theory, int n_particles, double total_len) {
    const double pi = 3.14159265358979323846264338328;
    switch (theory) {
        case WeylTheory::Distinguishable2:
            return total_len * total_len / (4.0 * pi);
        case WeylTheory::Bose2:
            return total_len * total_len / (8.0 * pi);
        case WeylTheory::DistinguishableN:
        case WeylTheory::BoseN: {
            const double half_n = 0.5 * n_particles;
            double slope = std::pow(total_len, n_particles) /
                           (std::pow(4.0 * pi, half_n) * std::tgamma(1.0 + half_n));
            if (theory == WeylTheory::BoseN)
                for (int i = 2; i <= n_particles; ++i) slope /= i;
            return slope;
        }
    }
    throw Error(ErrorCode::ValidationError, "unknown Weyl theory selector");
}

}  // namespace

const char* sector_name(Sector s) {
    switch (s) {
        case Sector::Bose: return "bose";
        case Sector::Fermi: return "fermi";
        case Sector::None: return "none";
    }
    return "none";
}

SpectralResult one_particle_spectrum(const MetricGraph& g, const VertexConditions& vc, int m,
                                     double h, EigenRequest::Mode mode) {
    if (m < 1) throw Error(ErrorCode::ValidationError, "eigenvalue count must be positive");
    OneParticleForm op = assemble_one_particle(g, vc, h);
    EigenRequest req;
    req.m = m;
    req.mode = mode;
    EigenResult res = solve(op.K, op.M, req);
    SpectralResult out;
    out.eigenvalues = res.eigenvalues;
    out.sectors.assign(res.eigenvalues.size(), Sector::None);
    out.residuals = res.residuals;
    out.h = h;
    out.particle_count = 1;
    return out;
}

SpectralResult two_particle_spectrum(const GraphSpec& spec, int m, double h,
                                     EigenRequest::Mode mode) {
    if (spec.particle_count != 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "two-particle pipeline requires n = 2");
    return spectrum_nd(spec, m, h, mode);
}

SpectralResult n_particle_spectrum(const GraphSpec& spec, int m, double h,
                                   EigenRequest::Mode mode) {
    if (spec.particle_count < 3)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "n-particle pipeline requires n >= 3");
    return spectrum_nd(spec, m, h, mode);
}

SpectralResult compute_spectrum(const GraphSpec& spec, int m, double h,
                                EigenRequest::Mode mode) {
    if (spec.particle_count == 1) {
        if (spec.contact.kind != ContactSpec::Kind::None)
            throw Error(ErrorCode::ValidationError,
                        "contact interactions need at least two particles");
        SpectralResult out =
            one_particle_spectrum(spec.graph, resolve_and_validate(spec), m, h, mode);
        out.fingerprint = fingerprint(spec);
        return out;
    }
    if (spec.particle_count == 2) return two_particle_spectrum(spec, m, h, mode);
    return n_particle_spectrum(spec, m, h, mode);
}

std::vector<Sector> classify_sectors(const Mesh& mesh, const DiscreteForm& form,
                                     const EigenResult& res) {
    const int total = static_cast<int>(res.eigenvalues.size());
    std::vector<Sector> labels(total, Sector::None);
    if (total == 0 || mesh.symmetry_nodes.size() < 2) return labels;
    const auto sym = symmetry_forms(mesh, form);
    const int nperm = static_cast<int>(sym.size());
    const int npart = nperm == 2 ? 2 : 3;
    const std::vector<int> perms = lex_permutations(npart);

    const auto clusters = eigenvalue_clusters(res.eigenvalues);
    for (const auto& c : clusters) {
        // a trailing cluster of a partial solve may be truncated; leave it
        // unlabeled unless the solve covers the full space
        const bool truncated = c.back() == total - 1 && total < form.dim();
        const int d = static_cast<int>(c.size());
        Eigen::MatrixXd X(res.vectors.rows(), d);
        for (int i = 0; i < d; ++i) X.col(i) = res.vectors.col(c[i]);

        if (nperm == 2) {
            Eigen::MatrixXd W = X.transpose() * (sym[1] * X);
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
            double defect = (W * W - I).cwiseAbs().maxCoeff();
            defect = std::max(defect, (W - W.transpose()).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
            for (int i = 0; i < d; ++i)
                defect = std::max(defect, std::abs(std::abs(es.eigenvalues()(i)) - 1.0));
            if (defect > 1e-6) {
                if (truncated) continue;
                throw Error(ErrorCode::NonSymmetricProblem,
                            "exchange is not an involution on a resolved eigenspace");
            }
            for (int i = 0; i < d; ++i)
                labels[c[i]] = es.eigenvalues()(i) < 0.0 ? Sector::Fermi : Sector::Bose;
        } else {
            // projector averages over the permutation action; their difference
            // has spectrum +1 (bose), -1 (fermi), 0 (mixed symmetry)
            Eigen::MatrixXd wb = Eigen::MatrixXd::Zero(d, d), wf = wb;
            for (int g = 0; g < nperm; ++g) {
                const Eigen::MatrixXd Wg = X.transpose() * (sym[g] * X);
                wb += Wg;
                wf += permutation_sign(&perms[g * npart], npart) * Wg;
            }
            wb /= nperm;
            wf /= nperm;
            double defect = std::max((wb * wb - wb).cwiseAbs().maxCoeff(),
                                     (wf * wf - wf).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                0.5 * (wb + wb.transpose() - wf - wf.transpose()));
            for (int i = 0; i < d; ++i) {
                const double w = es.eigenvalues()(i);
                defect = std::max(
                    defect, std::min({std::abs(w - 1.0), std::abs(w), std::abs(w + 1.0)}));
            }
            if (defect > 1e-6) {
                if (truncated) continue;
                throw Error(ErrorCode::NonSymmetricProblem,
                            "permutation averages fail to project on a resolved eigenspace");
            }
            for (int i = 0; i < d; ++i) {
                const double w = es.eigenvalues()(i);
                if (w > 0.5)
                    labels[c[i]] = Sector::Bose;
                else if (w < -0.5)
                    labels[c[i]] = Sector::Fermi;
            }
        }
    }
    return labels;
}

int counting_function(const SpectralResult& res, double lambda) {
    if (res.eigenvalues.empty())
        throw Error(ErrorCode::TooFewEigenvalues, "no eigenvalues resolved");
    if (lambda > res.eigenvalues.back())
        throw Error(ErrorCode::OutOfResolvedRange,
                    "counting level lies above the resolved spectrum");
    return static_cast<int>(
        std::upper_bound(res.eigenvalues.begin(), res.eigenvalues.end(), lambda) -
        res.eigenvalues.begin());
}

WeylFit weyl_fit(const SpectralResult& res, WeylTheory theory, const MetricGraph& g) {
    const int n = res.count();
    if (n < 100)
        throw Error(ErrorCode::TooFewEigenvalues,
                    "Weyl fit requires at least 100 resolved eigenvalues");
    const int lo = 5;
    const int hi = static_cast<int>(std::floor(0.7 * n));
    if (hi - lo < 2)
        throw Error(ErrorCode::TooFewEigenvalues, "fit window is empty");

    const double p = 0.5 * res.particle_count;
    double num = 0.0, den = 0.0;
    for (int i = lo; i < hi; ++i) {
        const double lam = res.eigenvalues[i];
        if (lam <= 0.0) continue;
        const double count = static_cast<double>(
            std::upper_bound(res.eigenvalues.begin(), res.eigenvalues.end(), lam) -
            res.eigenvalues.begin());
        const double x = std::pow(lam, p);
        num += count * x;
        den += x * x;
    }
    if (den == 0.0)
        throw Error(ErrorCode::TooFewEigenvalues, "fit window has no positive eigenvalues");

    WeylFit fit;
    fit.fitted_slope = num / den;
    fit.theory_slope = theory_slope_for(theory, res.particle_count, total_length(g));
    fit.rel_deviation = std::abs(fit.fitted_slope - fit.theory_slope) / fit.theory_slope;
    fit.window_min = res.eigenvalues[lo];
    fit.window_max = res.eigenvalues[hi - 1];
    fit.count = hi - lo;
    return fit;
}

BracketReport bracketing_check(const GraphSpec& spec, int m, double h) {
    if (spec.particle_count != 2)
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "bracketing comparisons are defined for the two-particle problem");
    if (!spec.contact.repulsive())
        throw Error(ErrorCode::ValidationError,
                    "bracketing comparison requires a repulsive contact interaction");
    const VertexConditions vc = resolve_and_validate(spec);
    const DissectedDomain dd = dissect(spec.graph, 2, Statistics::Distinguishable);
    const Mesh mesh = build_mesh(dd, h);
    const DiscreteForm phys = assemble(spec.graph, mesh, dd, vc, spec.contact,
                                       FormWeights::Distinguishable, ConstraintVariant::Physical);
    const DiscreteForm dir =
        assemble(spec.graph, mesh, dd, vc, spec.contact, FormWeights::Distinguishable,
                 ConstraintVariant::DirichletComparison);
    const DiscreteForm rob =
        assemble(spec.graph, mesh, dd, vc, spec.contact, FormWeights::Distinguishable,
                 ConstraintVariant::RobinComparison);

    EigenResult res = solve_padded(phys.K, phys.M, m, EigenRequest::Mode::Auto);
    BracketReport rep;
    for (int i = 0; i < m; ++i) {
        const double lam = res.eigenvalues[i];
        const double probe = lam + std::max(1e-12, 1e-9 * std::abs(lam));
        const int nd = inertia_below(dir.K, dir.M, probe);
        const int np = inertia_below(phys.K, phys.M, probe);
        const int nr = inertia_below(rob.K, rob.M, probe);
        rep.levels.push_back(lam);
        rep.count_dirichlet.push_back(nd);
        rep.count_physical.push_back(np);
        rep.count_robin.push_back(nr);
        if (nd > np) ++rep.violations;
        if (np > nr) ++rep.violations;
    }
    return rep;
}

ConvergenceStudy convergence_study(const GraphSpec& spec, int m,
                                   const std::vector<double>& h_levels) {
    if (h_levels.size() < 3)
        throw Error(ErrorCode::ValidationError,
                    "convergence study needs at least three mesh levels");
    ConvergenceStudy study;
    study.h_levels = h_levels;
    std::sort(study.h_levels.begin(), study.h_levels.end(), std::greater<double>());
    for (size_t i = 1; i < study.h_levels.size(); ++i)
        if (!(study.h_levels[i] < study.h_levels[i - 1]))
            throw Error(ErrorCode::ValidationError, "mesh levels must be distinct");

    for (double h : study.h_levels)
        study.eigenvalues.push_back(compute_spectrum(spec, m, h).eigenvalues);

    const size_t L = study.h_levels.size();
    const double r = study.h_levels[L - 2] / study.h_levels[L - 1];
    for (int k = 0; k < m; ++k) {
        const double coarse = study.eigenvalues[L - 3][k];
        const double mid = study.eigenvalues[L - 2][k];
        const double fine = study.eigenvalues[L - 1][k];
        const double d1 = coarse - mid, d2 = mid - fine;
        const double scale = std::max(1.0, std::abs(fine));
        double order;
        if (std::abs(d2) < 1e-12 * scale || std::abs(d1) < 1e-12 * scale)
            order = std::numeric_limits<double>::infinity();
        else
            order = std::log(std::abs(d1 / d2)) / std::log(r);
        study.observed_order.push_back(order);
        study.richardson.push_back((r * r * fine - mid) / (r * r - 1.0));
        if (order < 1.5) study.flagged.push_back(k);
    }
    return study;
}

std::string spectrum_csv(const SpectralResult& res) {
    std::string out = "index,eigenvalue,sector,residual\n";
    char buf[160];
    for (int i = 0; i < res.count(); ++i) {
        const double r = i < static_cast<int>(res.residuals.size()) ? res.residuals[i] : 0.0;
        std::snprintf(buf, sizeof buf, "%d,%.15g,%s,%.15g\n", i, res.eigenvalues[i],
                      sector_name(res.sectors[i]), r);
        out += buf;
    }
    return out;
}

std::string weyl_json(const WeylFit& fit) {
    json j;
    j["fitted_slope"] = fit.fitted_slope;
    j["theory_slope"] = fit.theory_slope;
    j["rel_deviation"] = fit.rel_deviation;
    j["window"] = {fit.window_min, fit.window_max};
    j["count"] = fit.count;
    return j.dump(2) + "\n";
}

std::string report_json(const GraphSpec& spec, const SpectralResult& res) {
    const VertexConditions vc = spec.resolve_vertex_conditions();
    const ValidationReport v = validate_pl(vc, spec.contact, spec.graph);
    json j;
    j["fingerprint"] = fingerprint(spec);
    j["h"] = res.h;
    j["particles"] = spec.particle_count;
    j["statistics"] = spec.statistics == Statistics::Bosonic ? "bosonic" : "distinguishable";
    j["eigenvalue_count"] = res.count();
    j["validation"] = {{"pass", v.pass},
                       {"projector_defect", v.projector_defect},
                       {"l_selfadjoint_defect", v.l_selfadjoint_defect},
                       {"l_kernel_defect", v.l_kernel_defect},
                       {"failures", v.failures}};
    j["advisories"] = check_regularity_hypotheses(vc, spec.contact);
    int nb = 0, nf = 0, nn = 0;
    for (Sector s : res.sectors) {
        if (s == Sector::Bose) ++nb;
        else if (s == Sector::Fermi) ++nf;
        else ++nn;
    }
    j["sectors"] = {{"bose", nb}, {"fermi", nf}, {"none", nn}};
    double max_res = 0.0;
    for (double r : res.residuals) max_res = std::max(max_res, r);
    j["max_residual"] = max_res;
    return j.dump(2) + "\n";
}

std::string matrix_coordinate_dump(const SpMat& a) {
    std::vector<std::array<double, 3>> entries;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it)
            entries.push_back({static_cast<double>(it.row()), static_cast<double>(it.col()),
                               it.value()});
    std::sort(entries.begin(), entries.end(),
              [](const auto& x, const auto& y) {
                  return x[0] != y[0] ? x[0] < y[0] : x[1] < y[1];
              });
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d %d %zu\n", static_cast<int>(a.rows()),
                  static_cast<int>(a.cols()), entries.size());
    std::string out = buf;
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof buf, "%d %d %.15g\n", static_cast<int>(e[0]),
                      static_cast<int>(e[1]), e[2]);
        out += buf;
    }
    return out;
}

}  // namespace qgraph
