#pragma once

// Branches of ground states as q -> 1^- and their limiting amplitude t*.

#include <optional>
#include <string_view>
#include <vector>

#include "sublin/analysis_types.hpp"
#include "sublin/domain.hpp"
#include "sublin/nonlinear.hpp"

namespace sublin {

/// exp(-∫ a φ² log φ / ∫ a φ²).
double t_star(const ScalarField& a, const ScalarField& phi);

enum class Regime { ToZero, ToTStarPhi, ToInfinity };

std::string_view regime_name(Regime regime) noexcept;

Regime regime_classify(double mu, double tol = 1e-8);

/// μ(a) a, whose principal eigenvalue is 1.
ScalarField normalize_weight(const ScalarField& a, BoundaryCondition bc);

struct BranchPoint {
    double q = 0.0;
    bool converged = false;
    SolutionKind kind = SolutionKind::Trivial;
    double norm_inf = 0.0;
    double min_u = 0.0;
    double energy = 0.0;
    std::optional<double> gamma1;
    /// ||μ^{1/(1-q)} u_q - t* φ||_inf; empty when μ^{1/(1-q)} overflows.
    std::optional<double> scaled_distance;
    bool overflow = false;
    ScalarField u;
};

struct BranchData {
    std::vector<BranchPoint> points;  // ascending q
    double mu = 0.0;
    double t_star = 0.0;
    Regime regime = Regime::ToTStarPhi;
    /// scaled_distance nonincreasing over the last three points (slack 1.1).
    bool healthy = true;
};

inline const std::vector<double> kDefaultBranchQ{0.80, 0.85, 0.90, 0.95, 0.975, 0.99};

BranchData trace_branch(const ScalarField& a, BoundaryCondition bc, std::vector<double> q_list = kDefaultBranchQ,
                        const SolverOptions& opts = {});

}  // namespace sublin
