#pragma once

// Discrete energy and residual of -Δu = a u^q, the nonnegative ground state,
// monotone sub/supersolution iteration and explicit sub/supersolutions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sublin/analysis_types.hpp"
#include "sublin/domain.hpp"

namespace sublin {

struct SolverOptions {
    double tol_res = 1e-10;
    int max_starts = 8;
    std::uint64_t seed = 0;
    int max_iter = 4000;                 // projected-gradient iterations per start
    int max_newton = 200;
    double active_threshold = 1e-8;      // relative to ||u||_inf
    std::vector<ScalarField> extra_starts;  // e.g. a closed-form solution when one is known
};

struct SolveResult {
    ScalarField u;
    double residual_inf = 0.0;
    double energy = 0.0;
    int starts_used = 0;
    int iterations = 0;
    bool converged = false;
    std::optional<Classification> classification;  // filled by the analysis layer
    std::string note;
    /// Every converged start (deduplicated), lowest energy first.
    std::vector<ScalarField> candidates;
};

/// I_q(u) = 1/2 u^T K u - 1/(q+1) sum m a |u|^{q+1}.
double energy(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc);

/// F(u) = -Δu - a (u^+)^q at unknown nodes; Dirichlet boundary rows hold u itself.
ScalarField residual(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc);

/// Max-norm of the residual over every node.
double residual_inf(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc);

/// Multi-start minimisation of the energy over the nonnegative cone.
SolveResult ground_state(double q, const ScalarField& a, BoundaryCondition bc, const SolverOptions& opts = {});

/// Projected-gradient plus active-set Newton from a single initial guess.
SolveResult solve_from(double q, const ScalarField& a, BoundaryCondition bc, const ScalarField& guess,
                       const SolverOptions& opts = {});

struct MonotoneOptions {
    double tol = 1e-12;       // on ||u_{k+1} - u_k||_inf, relative to max(1, ||super||_inf)
    int max_iter = 400000;
    int warm_iter = 2000;     // cap when the subsolution vanishes somewhere
    double order_slack = 1e-12;
};

struct MonotoneResult {
    SolveResult result;
    double shift = 0.0;            // M in (-Δ + M)
    bool positive_sub = true;      // false when the subsolution vanishes somewhere
    int monotonicity_violations = 0;  // iterations that increased u somewhere
    bool newton_finish = false;    // Newton completed the monotone iterate
    bool fell_back = false;        // ground state used after failure
};

/// u_{k+1} = (-Δ + M)^{-1}(a u_k^q + M u_k), starting from the supersolution.
MonotoneResult monotone_iterate(double q, const ScalarField& a, BoundaryCondition bc, const ScalarField& sub,
                                const ScalarField& super, const SolverOptions& opts = {},
                                const MonotoneOptions& mopts = {});

struct Barrier {
    ScalarField field;
    double scale = 0.0;          // k for the supersolution, epsilon for the subsolution
    double eigenvalue = 0.0;     // lambda_B for the ball subsolution
    double worst_residual = 0.0; // min residual (super) or max residual (sub)
    bool verified = false;
};

/// k S(a^+) with k = 1.1 ||S(a^+)||_inf^{q/(1-q)} (Dirichlet).
Barrier build_supersolution(const ScalarField& a, double q);

struct Ball {
    double center = 0.0;
    double radius = 1.0;
};

/// epsilon phi_B on the ball, extended by zero, with phi_B the discrete
/// Dirichlet principal eigenfunction of the ball (max 1).
Barrier build_subsolution_ball(const ScalarField& a, double q, const Ball& ball);

/// Node indices lying strictly inside the ball.
std::vector<std::size_t> ball_nodes(const Grid& grid, const Ball& ball, bool closed = false);

}  // namespace sublin
