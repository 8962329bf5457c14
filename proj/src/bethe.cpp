#include "qgraph/bethe.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qgraph {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMinCoupling = 1e-8;

void validate_inputs(int n, double length, double c) {
    if (n < 1) throw Error(ErrorCode::ValidationError, "particle count must be positive");
    if (!(length > 0.0))
        throw Error(ErrorCode::ValidationError, "ring circumference must be positive");
    if (c < 0.0)
        throw Error(ErrorCode::ValidationError, "attractive couplings are not supported");
}

void validate_quantum_numbers(int n, const std::vector<double>& I) {
    if (static_cast<int>(I.size()) != n)
        throw Error(ErrorCode::BadQuantumNumbers,
                    "quantum number count must equal the particle count");
    const double shift = (n % 2 == 0) ? 0.5 : 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = I[j] - shift;
        if (std::abs(t - std::round(t)) > 1e-9)
            throw Error(ErrorCode::BadQuantumNumbers,
                        n % 2 == 0 ? "even particle counts need half-odd-integer quantum numbers"
                                   : "odd particle counts need integer quantum numbers");
        if (j > 0 && !(I[j] > I[j - 1]))
            throw Error(ErrorCode::BadQuantumNumbers,
                        "quantum numbers must be strictly increasing");
    }
}

Eigen::VectorXd bethe_defect(const Eigen::VectorXd& k, const std::vector<double>& I,
                             double length, double c) {
    const int n = static_cast<int>(k.size());
    Eigen::VectorXd F(n);
    for (int j = 0; j < n; ++j) {
        double phase = 0.0;
        for (int l = 0; l < n; ++l)
            if (l != j) phase += 2.0 * std::atan2(k(j) - k(l), c);
        F(j) = k(j) * length - kTwoPi * I[j] + phase;
    }
    return F;
}

/// All quantum-number tuples ordered by free-fermion energy then
/// lexicographically, certified complete up to the (count)-th entry.
std::vector<std::vector<double>> enumerate_tuples(int n, double length, int count,
                                                  double shift, bool strict) {
    const double scale = kTwoPi / length;
    for (double radius = n + count + 1.0;; radius *= 2.0) {
        std::vector<double> grid;
        for (double v = std::floor(-radius) + shift; v <= radius; v += 1.0) grid.push_back(v);
        std::vector<std::pair<double, std::vector<double>>> found;
        std::vector<double> tuple(n);
        auto rec = [&](auto&& self, int depth, size_t start, double energy) -> void {
            if (depth == n) {
                found.emplace_back(energy, tuple);
                return;
            }
            for (size_t i = start; i < grid.size(); ++i) {
                tuple[depth] = grid[i];
                const double kv = scale * grid[i];
                self(self, depth + 1, strict ? i + 1 : i, energy + kv * kv);
            }
        };
        rec(rec, 0, 0, 0.0);
        std::sort(found.begin(), found.end());
        if (static_cast<int>(found.size()) < count) continue;
        const double cutoff = found[count - 1].first;
        const double edge = scale * radius;
        if (edge * edge < cutoff) continue;  // a tuple outside the box could still beat it
        std::vector<std::vector<double>> out;
        out.reserve(count);
        for (int i = 0; i < count; ++i) out.push_back(std::move(found[i].second));
        return out;
    }
}

}  // namespace

BetheSolution solve_bethe(int n_particles, double total_length, double c,
                          const std::vector<double>& quantum_numbers) {
    validate_inputs(n_particles, total_length, c);
    validate_quantum_numbers(n_particles, quantum_numbers);
    const int n = n_particles;
    const double cc = std::max(c, kMinCoupling);

    Eigen::VectorXd k(n);
    for (int j = 0; j < n; ++j) k(j) = kTwoPi * quantum_numbers[j] / total_length;

    BetheSolution sol;
    sol.quantum_numbers = quantum_numbers;
    sol.c = cc;
    sol.length = total_length;

    const double tol = 2e-13;
    Eigen::VectorXd F = bethe_defect(k, quantum_numbers, total_length, cc);
    int it = 0;
    for (; it < 200 && F.cwiseAbs().maxCoeff() > tol; ++it) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int j = 0; j < n; ++j) {
            J(j, j) = total_length;
            for (int l = 0; l < n; ++l) {
                if (l == j) continue;
                const double d = k(j) - k(l);
                const double w = 2.0 * cc / (cc * cc + d * d);
                J(j, j) += w;
                J(j, l) -= w;
            }
        }
        const Eigen::VectorXd step = J.ldlt().solve(F);
        const double f0 = F.cwiseAbs().maxCoeff();
        double damp = 1.0;
        Eigen::VectorXd k_next;
        Eigen::VectorXd F_next;
        for (int h = 0; h < 50; ++h) {
            k_next = k - damp * step;
            F_next = bethe_defect(k_next, quantum_numbers, total_length, cc);
            if (F_next.cwiseAbs().maxCoeff() < f0) break;
            damp *= 0.5;
        }
        if (!(F_next.cwiseAbs().maxCoeff() < f0))
            throw Error(ErrorCode::NoConvergence, "Newton step failed to reduce the defect");
        k = k_next;
        F = F_next;
    }
    if (F.cwiseAbs().maxCoeff() > tol)
        throw Error(ErrorCode::NoConvergence, "Bethe equations did not reach tolerance");

    sol.k.assign(k.data(), k.data() + n);
    sol.energy = k.squaredNorm();
    sol.momentum = k.sum();
    sol.residual = F.cwiseAbs().maxCoeff();
    sol.iterations = it;
    return sol;
}

std::vector<BetheSolution> bethe_spectrum(int n_particles, double total_length, double c,
                                          int m) {
    validate_inputs(n_particles, total_length, c);
    if (m < 1) throw Error(ErrorCode::ValidationError, "level count must be positive");
    const double shift = (n_particles % 2 == 0) ? 0.5 : 0.0;
    const int buffered = m + 20;
    const auto tuples = enumerate_tuples(n_particles, total_length, buffered, shift, true);

    std::vector<BetheSolution> sols;
    sols.reserve(tuples.size());
    for (const auto& I : tuples) sols.push_back(solve_bethe(n_particles, total_length, c, I));
    std::stable_sort(sols.begin(), sols.end(),
                     [](const BetheSolution& a, const BetheSolution& b) {
                         if (a.energy != b.energy) return a.energy < b.energy;
                         return a.quantum_numbers < b.quantum_numbers;
                     });
    sols.resize(m);
    return sols;
}

std::vector<double> free_ring_spectrum(int n_particles, double total_length, int m,
                                       bool fermionic) {
    validate_inputs(n_particles, total_length, 0.0);
    if (m < 1) throw Error(ErrorCode::ValidationError, "level count must be positive");
    // Fermionic levels use the interacting integrality class so that they are
    // the exact c -> infinity limit; bosonic levels use integer modes.
    const double shift = fermionic && (n_particles % 2 == 0) ? 0.5 : 0.0;
    const auto tuples = enumerate_tuples(n_particles, total_length, m, shift, fermionic);
    const double scale = kTwoPi / total_length;
    std::vector<double> out;
    out.reserve(tuples.size());
    for (const auto& I : tuples) {
        double e = 0.0;
        for (double v : I) e += scale * v * scale * v;
        out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double bethe_coupling(double contact_strength) { return 0.5 * contact_strength; }

}  // namespace qgraph
