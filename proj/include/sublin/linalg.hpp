#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sublin/domain.hpp"

namespace sublin {

/// Thomas algorithm for a symmetric tridiagonal system. No pivoting: callers
/// pass M-matrices or matrices known to be positive definite.
std::vector<double> solve_tridiagonal(const SymTridiagonal& matrix, std::span<const double> rhs);

/// Factorised form for repeated solves with the same matrix.
class TridiagonalFactor {
public:
    explicit TridiagonalFactor(const SymTridiagonal& matrix);
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<double> sub_;    // off-diagonal
    std::vector<double> pivot_;  // LDL^T pivots
};

/// Number of negative pivots in the LDL^T factorisation of T - shift * diag(weight)
/// (Sylvester inertia, equal to the number of eigenvalues below the shift for
/// a positive weight).
int negative_pivot_count(const SymTridiagonal& matrix, std::span<const double> weight, double shift);

/// S(f): solution of -Δu = f with u = 0 on the boundary.
ScalarField solve_poisson(const ScalarField& f, BoundaryCondition bc = BoundaryCondition::Dirichlet);

/// ||S(1)||_inf, the L^inf -> L^inf norm of S (the discrete inverse is entrywise
/// nonnegative).
double operator_norm_S(const Grid& grid);

struct EigenPair {
    double mu = 0.0;
    ScalarField phi;
    double residual_inf = 0.0;
    int bisection_steps = 0;
    bool inertia_monotone = true;
};

/// Principal eigenpair of -Δφ = μ a φ: the smallest μ > 0 where the inertia of
/// K - μ M diag(a) jumps from 0 to 1. φ > 0 at unknown nodes, ∫φ² = 1.
EigenPair principal_eigenpair(const ScalarField& a, BoundaryCondition bc);

/// Same search on an explicit pencil K x = μ diag(weight) x. Returns μ and the
/// positive eigenvector normalised to max 1.
struct PencilEigen {
    double mu = 0.0;
    std::vector<double> vec;
    int bisection_steps = 0;
    bool inertia_monotone = true;
};
PencilEigen principal_pencil_eigen(const SymTridiagonal& stiffness, std::span<const double> weight,
                                   double mu_floor);

struct LinearizedEigen {
    double gamma1 = 0.0;
    double theta_clamp = 0.0;
    int clamped_nodes = 0;
};

inline constexpr double kPotentialClamp = 1e-6;

/// Smallest eigenvalue γ of -Δφ - q a u^{q-1} φ = γ φ. Nodes where u falls
/// below theta_clamp * ||u||_inf use the clamped value in the potential.
LinearizedEigen linearized_eigenvalue(double q, const ScalarField& u, const ScalarField& a,
                                      BoundaryCondition bc, double theta_clamp = kPotentialClamp);

}  // namespace sublin
