#include "sublin/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"
#include "sublin/oracles.hpp"
#include "sublin/weights.hpp"

namespace sublin {

std::string_view solution_kind_name(SolutionKind kind) noexcept {
    switch (kind) {
        case SolutionKind::Trivial: return "trivial";
        case SolutionKind::DeadCore: return "dead_core";
        case SolutionKind::PositiveNotStrong: return "positive_not_strong";
        case SolutionKind::StronglyPositive: return "strongly_positive";
    }
    return "unknown";
}

Classification classify(const ScalarField& u, BoundaryCondition bc, const ClassifyThresholds& th) {
    if (u.min() < -1e-12) throw Error(ErrorKind::NegativeValues, "classify expects u >= 0");
    const Grid& g = u.grid();
    DiscreteLaplacian lap(g, bc);
    const std::size_t first = lap.first();
    const std::size_t last = first + lap.count();  // one past

    Classification c;
    const double norm = u.max_abs();
    c.min_interior = norm;
    for (std::size_t i = first; i < last; ++i) c.min_interior = std::min(c.min_interior, u[i]);
    if (bc == BoundaryCondition::Dirichlet) c.boundary_derivatives = inward_boundary_slopes(u);
    if (norm <= th.trivial) {
        c.kind = SolutionKind::Trivial;
        return c;
    }

    // A dead core is a run of at least three small nodes that also holds
    // three consecutive numerical zeros; degenerate boundary zeros decay like
    // a power of the distance and never reach the zero level.
    const double small = th.dead_core * norm;
    const double zero = th.zero * norm;
    std::size_t i = first;
    while (i < last) {
        if (u[i] > small) {
            ++i;
            continue;
        }
        std::size_t j = i;
        int zero_run = 0, best_zero_run = 0;
        while (j < last && u[j] <= small) {
            zero_run = u[j] <= zero ? zero_run + 1 : 0;
            best_zero_run = std::max(best_zero_run, zero_run);
            ++j;
        }
        if (j - i >= 3 && best_zero_run >= 3) c.regions.emplace_back(i, j - 1);
        i = j;
    }
    if (!c.regions.empty()) {
        c.kind = SolutionKind::DeadCore;
        return c;
    }

    bool strong;
    if (bc == BoundaryCondition::Dirichlet) {
        const double slope_floor = th.derivative * norm / g.diameter();
        strong = c.min_interior > 0.0 &&
                 std::all_of(c.boundary_derivatives.begin(), c.boundary_derivatives.end(),
                             [&](double s) { return s >= slope_floor; });
    } else {
        strong = u.min() > th.positive * norm;
    }
    c.kind = strong ? SolutionKind::StronglyPositive : SolutionKind::PositiveNotStrong;
    return c;
}

double unknown_min(const ScalarField& u, BoundaryCondition bc) {
    DiscreteLaplacian lap(u.grid(), bc);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = lap.first(); i < lap.first() + lap.count(); ++i) m = std::min(m, u[i]);
    return m;
}

ScalarField v_transform(const ScalarField& u, double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
    ScalarField v = u;
    for (double& x : v.values()) {
        if (x < 0.0) throw Error(ErrorKind::NegativeValues, "v_transform expects u >= 0");
        x = std::pow(x, 1.0 - q) / (1.0 - q);
    }
    return v;
}

UniquenessReport uniqueness_check(const ScalarField& u1, const ScalarField& u2, double q, BoundaryCondition bc,
                                  const ClassifyThresholds& th) {
    (void)q;
    require_same_grid(u1, u2, "uniqueness_check: fields on different grids");
    DiscreteLaplacian lap(u1.grid(), bc);
    for (std::size_t i = lap.first(); i < lap.first() + lap.count(); ++i) {
        if (!(u1[i] > 0.0 && u2[i] > 0.0)) {
            throw Error(ErrorKind::NotPositive, "uniqueness_check needs positive interiors");
        }
    }
    UniquenessReport r;
    for (std::size_t i = 0; i < u1.size(); ++i) r.max_gap = std::max(r.max_gap, std::abs(u1[i] - u2[i]));
    r.consistent = r.max_gap <= th.uniqueness * std::max(u1.max_abs(), u2.max_abs());
    return r;
}

double apriori_bound(const ScalarField& a, double q) {
    return std::pow(operator_norm_S(a.grid()) * positive_part(a).max_abs(), 1.0 / (1.0 - q));
}

namespace {

SweepPoint solve_point(const ScalarField& a, BoundaryCondition bc, double q, const SolverOptions& opts,
                       const ClassifyThresholds& th) {
    SolveResult r = ground_state(q, a, bc, opts);
    SweepPoint p{q, r.converged, SolutionKind::Trivial, r.u.max_abs(), unknown_min(r.u, bc), r.energy, r.residual_inf,
                 std::nullopt, r.u};
    if (r.converged) p.kind = classify(r.u, bc, th).kind;
    if (p.norm_inf > 0.0) p.gamma1 = linearized_eigenvalue(q, r.u, a, bc).gamma1;
    return p;
}

bool strongly_positive(const SweepPoint& p) { return p.converged && p.kind == SolutionKind::StronglyPositive; }

}  // namespace

SweepReport positivity_sweep(const ScalarField& a, BoundaryCondition bc, const std::vector<double>& q_grid,
                             const SolverOptions& opts, int jobs, double resolution, const ClassifyThresholds& th) {
    if (q_grid.empty()) throw Error(ErrorKind::InvalidArgument, "q grid is empty");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!(q_grid[i] > 0.0 && q_grid[i] < 1.0)) throw Error(ErrorKind::InvalidArgument, "q values must lie in (0, 1)");
        if (i > 0 && !(q_grid[i] > q_grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "q grid must be increasing");
    }
    SweepReport rep;
    rep.points.resize(q_grid.size(), SweepPoint{0.0, false, SolutionKind::Trivial, 0, 0, 0, 0, std::nullopt,
                                                ScalarField(a.grid())});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < q_grid.size(); i = next++) rep.points[i] = solve_point(a, bc, q_grid[i], opts, th);
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(q_grid.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Converged points only; unconverged points are reported but carry no
    // evidence about the structure.
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        if (rep.points[i].converged) used.push_back(i);
    }
    std::size_t suffix = used.size();
    while (suffix > 0 && strongly_positive(rep.points[used[suffix - 1]])) --suffix;
    for (std::size_t k = 0; k < suffix; ++k) {
        if (strongly_positive(rep.points[used[k]])) rep.interval_ok = false;
    }
    if (suffix == used.size()) return rep;  // no strongly positive point
    if (suffix == 0) {
        rep.q_hat = rep.points[used.front()].q;
        return rep;
    }
    double lo = rep.points[used[suffix - 1]].q;
    double hi = rep.points[used[suffix]].q;
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        const SweepPoint p = solve_point(a, bc, mid, opts, th);
        ++rep.bisection_steps;
        if (strongly_positive(p)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    rep.q_hat = hi;
    return rep;
}

double c_nq(int dim, double q) {
    if (dim < 1) throw Error(ErrorKind::InvalidDimension, "N must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
    return (1.0 - q) * (1.0 - q) / (2.0 * (dim * (1.0 - q) + 2.0 * q));
}

DeadcorePrediction deadcore_predict(const ScalarField& a, const Ball& ball, double q) {
    const Grid& g = a.grid();
    if (!(ball.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
    if (g.is_radial() && ball.center != 0.0) {
        throw Error(ErrorKind::InvalidArgument, "balls on a radial grid must be centred at the origin");
    }
    DeadcorePrediction p;
    p.c_nq = c_nq(g.dim(), q);
    const auto closed = ball_nodes(g, ball, true);
    if (closed.empty()) throw Error(ErrorKind::InvalidArgument, "the ball contains no grid node");
    p.a_lower = std::numeric_limits<double>::infinity();
    for (std::size_t i : closed) {
        if (a[i] > 0.0) throw Error(ErrorKind::BallIntersectsPositive, "a > 0 at node " + std::to_string(i));
        p.a_lower = std::min(p.a_lower, -a[i]);
    }
    p.threshold_ia = operator_norm_S(g) * positive_part(a).max_abs() / (ball.radius * ball.radius * p.c_nq);
    p.condition_met = p.a_lower >= p.threshold_ia;
    p.barrier = p.a_lower > 0.0 ? oracles::barrier_w(ball.center, p.a_lower, q, g.dim(), g) : ScalarField(g);
    p.ball = ball_nodes(g, ball, false);
    return p;
}

std::vector<std::size_t> shrunken_support(const ScalarField& b2, double rho) {
    const Grid& g = b2.grid();
    std::vector<double> outside;
    for (std::size_t i = 0; i < b2.size(); ++i) {
        if (!(b2[i] > 0.0)) outside.push_back(g.x(i));
    }
    if (!g.is_radial()) outside.push_back(g.lo());
    outside.push_back(g.hi());
    std::vector<std::size_t> core;
    for (std::size_t i = 0; i < b2.size(); ++i) {
        if (!(b2[i] > 0.0)) continue;
        double d = std::numeric_limits<double>::infinity();
        for (double x : outside) d = std::min(d, std::abs(g.x(i) - x));
        if (d > rho) core.push_back(i);
    }
    return core;
}

DeltaSweepReport deadcore_delta_sweep(const ScalarField& b1, const ScalarField& b2, double q, double rho,
                                      const std::vector<double>& deltas, BoundaryCondition bc,
                                      const SolverOptions& opts, const ClassifyThresholds& th) {
    require_disjoint_supports(b1, b2);
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] > deltas[i - 1])) throw Error(ErrorKind::InvalidArgument, "deltas must be increasing");
    }
    DeltaSweepReport rep;
    rep.core = shrunken_support(b2, rho);
    for (double delta : deltas) {
        if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
        ScalarField a = b1;
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = b1[i] - delta * b2[i];
        const SolveResult r = ground_state(q, a, bc, opts);
        DeltaRow row;
        row.delta = delta;
        row.converged = r.converged;
        row.vanishes_on_core = r.converged;
        for (const auto& u : r.candidates) {
            const double norm = u.max_abs();
            if (norm <= th.trivial) continue;
            ++row.nontrivial_solutions;
            for (std::size_t i : rep.core) {
                row.max_on_core = std::max(row.max_on_core, u[i] / norm);
                if (u[i] > th.dead_core * norm) row.vanishes_on_core = false;
            }
        }
        if (row.vanishes_on_core && !rep.delta_first_deadcore) rep.delta_first_deadcore = delta;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace sublin
