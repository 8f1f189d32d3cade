#pragma once

// Classification of computed solutions, positivity sweeps in q, uniqueness
// cross-checks and dead-core prediction.

#include <optional>
#include <vector>

#include "sublin/analysis_types.hpp"
#include "sublin/domain.hpp"
#include "sublin/nonlinear.hpp"

namespace sublin {

/// Trivial, dead core, positive but not strongly positive, or strongly positive.
Classification classify(const ScalarField& u, BoundaryCondition bc, const ClassifyThresholds& th = {});

/// Smallest value over the unknown nodes (boundary nodes excluded under Dirichlet).
double unknown_min(const ScalarField& u, BoundaryCondition bc);

/// v = u^{1-q} / (1-q).
ScalarField v_transform(const ScalarField& u, double q);

struct UniquenessReport {
    double max_gap = 0.0;
    bool consistent = false;
};

UniquenessReport uniqueness_check(const ScalarField& u1, const ScalarField& u2, double q, BoundaryCondition bc,
                                  const ClassifyThresholds& th = {});

/// (||S(1)||_inf ||a^+||_inf)^{1/(1-q)}: bound on every nontrivial Dirichlet solution.
double apriori_bound(const ScalarField& a, double q);

struct SweepPoint {
    double q = 0.0;
    bool converged = false;
    SolutionKind kind = SolutionKind::Trivial;
    double norm_inf = 0.0;
    double min_u = 0.0;
    double energy = 0.0;
    double residual_inf = 0.0;
    std::optional<double> gamma1;
    ScalarField u;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    std::optional<double> q_hat;
    bool interval_ok = true;
    int bisection_steps = 0;
};

/// Ground state and classification at every q of a sorted grid in (0, 1),
/// followed by bisection of the strongly positive threshold to `resolution`.
/// Points run on `jobs` threads; the report does not depend on `jobs`.
SweepReport positivity_sweep(const ScalarField& a, BoundaryCondition bc, const std::vector<double>& q_grid,
                             const SolverOptions& opts = {}, int jobs = 1, double resolution = 1e-3,
                             const ClassifyThresholds& th = {});

/// C_{N,q} = (1-q)^2 / (2 (N (1-q) + 2q)).
double c_nq(int dim, double q);

struct DeadcorePrediction {
    double c_nq = 0.0;
    double threshold_ia = 0.0;
    double a_lower = 0.0;  // min of a^- over the closed ball
    bool condition_met = false;
    ScalarField barrier;
    std::vector<std::size_t> ball;  // nodes of the open ball
};

/// Sufficient condition for u to vanish at the centre of a ball inside {a <= 0}.
DeadcorePrediction deadcore_predict(const ScalarField& a, const Ball& ball, double q);

struct DeltaRow {
    double delta = 0.0;
    bool converged = false;
    int nontrivial_solutions = 0;
    bool vanishes_on_core = false;
    double max_on_core = 0.0;  // largest u / ||u||_inf over the core, across solutions
};

struct DeltaSweepReport {
    std::vector<DeltaRow> rows;
    std::vector<std::size_t> core;  // nodes of G^rho
    std::optional<double> delta_first_deadcore;
};

/// Nodes of {b2 > 0} at distance greater than rho from its complement.
std::vector<std::size_t> shrunken_support(const ScalarField& b2, double rho);

DeltaSweepReport deadcore_delta_sweep(const ScalarField& b1, const ScalarField& b2, double q, double rho,
                                      const std::vector<double>& deltas, BoundaryCondition bc,
                                      const SolverOptions& opts = {}, const ClassifyThresholds& th = {});

}  // namespace sublin
