#pragma once

// Closed-form reference solutions and an independent brute-force minimiser.

#include <cstdint>
#include <string>

#include "sublin/domain.hpp"

namespace sublin::oracles {

struct OraclePair {
    ScalarField a;
    ScalarField u;
    std::string meta;
};

/// a = r^{1-2/r} (1 - r cos^2 x), u = sin^r x / r with r = 2/(1-q) on [0, pi].
OraclePair exact_example(double q, const Grid& grid);

/// x^2 - pi x + 1 - cos 2x on [0, pi]: S(a) for the q = 1/2 weight.
ScalarField exact_poisson_reference(const Grid& grid);

/// w(x) = (C_{N,q} a_lo |x - x0|^2)^{1/(1-q)}.
ScalarField barrier_w(double x0, double a_lo, double q, int dim, const Grid& grid);

struct BruteForceResult {
    ScalarField u;
    double energy = 0.0;
    double stationarity = 0.0;
    bool converged = false;
    int starts = 0;
};

/// Plain projected gradient with Barzilai-Borwein trial steps and Armijo
/// backtracking from many seeded random starts. Small grids only (n <= 63).
BruteForceResult brute_force_ground_state(double q, const ScalarField& a, BoundaryCondition bc, int starts = 64,
                                          std::uint64_t seed = 12345, double tol = 1e-13);

}  // namespace sublin::oracles
