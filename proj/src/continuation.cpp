#include "sublin/continuation.hpp"

#include <algorithm>
#include <cmath>

#include "sublin/analysis.hpp"
#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"

namespace sublin {

double t_star(const ScalarField& a, const ScalarField& phi) {
    require_same_grid(a, phi, "t_star: a and phi live on different grids");
    ScalarField num(a.grid()), den(a.grid()), mag(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (phi[i] < 0.0) throw Error(ErrorKind::NegativeValues, "t_star expects phi >= 0");
        const double w = a[i] * phi[i] * phi[i];
        den[i] = w;
        mag[i] = std::abs(w);
        num[i] = phi[i] <= 1e-300 ? 0.0 : w * std::log(phi[i]);
    }
    const double d = integrate(den);
    if (!(std::abs(d) > 1e-14 * integrate(mag))) {
        throw Error(ErrorKind::DegenerateDenominator, "the integral of a phi^2 vanishes");
    }
    return std::exp(-integrate(num) / d);
}

std::string_view regime_name(Regime regime) noexcept {
    switch (regime) {
        case Regime::ToZero: return "to_zero";
        case Regime::ToTStarPhi: return "to_t_star_phi";
        case Regime::ToInfinity: return "to_infinity";
    }
    return "unknown";
}

Regime regime_classify(double mu, double tol) {
    if (!(mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
    if (std::abs(mu - 1.0) <= tol) return Regime::ToTStarPhi;
    return mu > 1.0 ? Regime::ToZero : Regime::ToInfinity;
}

ScalarField normalize_weight(const ScalarField& a, BoundaryCondition bc) {
    return scaled(a, principal_eigenpair(a, bc).mu);
}

BranchData trace_branch(const ScalarField& a, BoundaryCondition bc, std::vector<double> q_list,
                        const SolverOptions& opts) {
    if (q_list.empty()) throw Error(ErrorKind::InvalidArgument, "q list is empty");
    std::sort(q_list.begin(), q_list.end());
    for (double q : q_list) {
        if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q values must lie in (0, 1)");
    }
    const EigenPair ep = principal_eigenpair(a, bc);
    BranchData br;
    br.mu = ep.mu;
    br.t_star = t_star(a, ep.phi);
    br.regime = regime_classify(ep.mu);

    const double log_mu = std::log(ep.mu);
    const double log_cap = std::log(1e300);
    std::optional<ScalarField> previous;
    double previous_q = 0.0;
    for (double q : q_list) {
        SolverOptions o = opts;
        const double expo = log_mu / (1.0 - q);
        if (previous) {
            const double shift = -log_mu * (1.0 / (1.0 - q) - 1.0 / (1.0 - previous_q));
            if (std::abs(shift) < log_cap) o.extra_starts.push_back(scaled(*previous, std::exp(shift)));
        }
        if (std::abs(expo) < log_cap) o.extra_starts.push_back(scaled(ep.phi, br.t_star * std::exp(-expo)));
        o.max_starts = std::max(o.max_starts, static_cast<int>(o.extra_starts.size()) + 2);

        const SolveResult r = ground_state(q, a, bc, o);
        BranchPoint p;
        p.q = q;
        p.converged = r.converged;
        p.u = r.u;
        p.norm_inf = r.u.max_abs();
        p.min_u = unknown_min(r.u, bc);
        p.energy = r.energy;
        // Branches with mu > 1 shrink like mu^{-1/(1-q)}; the trivial level
        // follows the expected amplitude.
        ClassifyThresholds th;
        th.trivial *= std::min(1.0, br.t_star * ep.phi.max_abs() * std::exp(-std::min(expo, log_cap)));
        if (r.converged) p.kind = classify(r.u, bc, th).kind;
        if (p.norm_inf > 0.0) p.gamma1 = linearized_eigenvalue(q, r.u, a, bc).gamma1;
        if (std::abs(expo) < log_cap) {
            const double s = std::exp(expo);
            double dist = 0.0;
            for (std::size_t i = 0; i < r.u.size(); ++i) dist = std::max(dist, std::abs(s * r.u[i] - br.t_star * ep.phi[i]));
            p.scaled_distance = dist;
        } else {
            p.overflow = true;
        }
        br.points.push_back(std::move(p));
        if (r.converged) {
            previous = r.u;
            previous_q = q;
        }
    }
    const std::size_t np = br.points.size();
    for (std::size_t i = np >= 3 ? np - 2 : 1; i < np; ++i) {
        const auto& prev = br.points[i - 1].scaled_distance;
        const auto& cur = br.points[i].scaled_distance;
        if (!prev || !cur || *cur > 1.1 * *prev) br.healthy = false;
    }
    return br;
}

}  // namespace sublin
