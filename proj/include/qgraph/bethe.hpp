#pragma once

#include "qgraph/errors.hpp"

#include <vector>

namespace qgraph {

/// One root of the logarithmic Bethe equations for N delta-interacting bosons
/// on a ring: k_j L = 2 pi I_j - sum_{l != j} 2 atan2(k_j - k_l, c).
struct BetheSolution {
    std::vector<double> k;                // quasi-momenta, strictly increasing for c > 0
    std::vector<double> quantum_numbers;  // half-odd integers (N even) or integers (N odd)
    double c = 0.0;
    double length = 0.0;
    double energy = 0.0;    // sum of k_j^2
    double momentum = 0.0;  // sum of k_j
    double residual = 0.0;  // max absolute equation defect
    int iterations = 0;
};

/// Damped Newton iteration from the free-fermion start k_j = 2 pi I_j / L.
/// Quantum numbers must be strictly increasing and lie in the integrality
/// class fixed by the particle count. c below 1e-8 is clamped (free-boson
/// limit); negative c is rejected.
BetheSolution solve_bethe(int n_particles, double total_length, double c,
                          const std::vector<double>& quantum_numbers);

/// The m lowest ring energies: enumerates quantum-number tuples by increasing
/// free-fermion energy (with a safety buffer), solves each, sorts by energy.
std::vector<BetheSolution> bethe_spectrum(int n_particles, double total_length, double c,
                                          int m);

/// Free N-particle energies on the ring: sums of squares of 2 pi I / L over
/// tuples of integer modes, weakly increasing (bosons) or strictly increasing
/// (fermions). Oracle for the c -> 0 and c -> infinity limits.
std::vector<double> free_ring_spectrum(int n_particles, double total_length, int m,
                                       bool fermionic);

/// Oracle coupling equivalent to a constant contact strength alpha: the pair
/// term alpha delta(x_i - x_j) forces the relative-coordinate derivative jump
/// [d_r psi] = (alpha / 2) psi, and the phase shifts above are parameterized
/// by that jump coefficient.
double bethe_coupling(double contact_strength);

}  // namespace qgraph
