#include "sublin/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"

namespace sublin {

namespace {

constexpr double kDiverged = 1e200;

double pos_pow(double v, double q) { return v > 0.0 ? std::pow(v, q) : 0.0; }

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Everything the solver needs on the unknown nodes.
struct Problem {
    DiscreteLaplacian lap;
    std::vector<double> a;
    double q;

    Problem(double q_, const ScalarField& a_field, BoundaryCondition bc)
        : lap(a_field.grid(), bc), a(lap.restrict(a_field)), q(q_) {}

    std::size_t n() const { return a.size(); }
    std::span<const double> mass() const { return lap.mass(); }

    double energy(std::span<const double> u) const {
        const auto ku = lap.apply_stiffness(u);
        double quad = 0.0, pot = 0.0;
        for (std::size_t k = 0; k < n(); ++k) {
            quad += u[k] * ku[k];
            pot += mass()[k] * a[k] * std::pow(std::abs(u[k]), q + 1.0);
        }
        return 0.5 * quad - pot / (q + 1.0);
    }

    // Euclidean gradient of the energy, equal to M F(u).
    std::vector<double> gradient(std::span<const double> u) const {
        auto g = lap.apply_stiffness(u);
        for (std::size_t k = 0; k < n(); ++k) g[k] -= mass()[k] * a[k] * pos_pow(u[k], q);
        return g;
    }

    double residual_inf(std::span<const double> u) const {
        const auto g = gradient(u);
        double r = 0.0;
        for (std::size_t k = 0; k < n(); ++k) r = std::max(r, std::abs(g[k] / mass()[k]));
        return r;
    }
};

// Unique root v >= 0 of kd v - m a v^q = b with b >= 0; for a > 0 and b = 0 the
// positive root is returned.
double scalar_root(double kd, double ma, double q, double b) {
    auto g = [&](double v) { return kd * v - ma * std::pow(v, q) - b; };
    double lo, hi;
    if (ma <= 0.0) {
        if (b <= 0.0) return 0.0;
        // Each of the two increasing terms alone reaching b (or b/2) brackets
        // the root within a factor 2^{1/q}.
        hi = b / kd;
        lo = 0.5 * b / kd;
        if (ma < 0.0) {
            hi = std::min(hi, std::pow(b / -ma, 1.0 / q));
            lo = std::min(lo, std::pow(0.5 * b / -ma, 1.0 / q));
        }
    } else {
        lo = std::pow(ma / kd, 1.0 / (1.0 - q));
        hi = std::max(2.0 * lo, 1e-300);
        while (g(hi) < 0.0) hi *= 2.0;
    }
    if (!(hi > 0.0)) return 0.0;
    if (!(lo > 0.0)) lo = std::numeric_limits<double>::denorm_min();
    if (g(lo) >= 0.0) return lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = (hi / lo > 4.0) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
}

// Projected preconditioned gradient descent with Armijo backtracking.
struct DescentOutcome {
    int iterations = 0;
    bool diverged = false;
};

DescentOutcome projected_descent(const Problem& p, const SymTridiagonal& precond, std::vector<double>& u,
                                 int max_iter, double stationarity) {
    DescentOutcome out;
    const std::size_t n = p.n();
    double e = p.energy(u);
    std::vector<double> trial(n);
    for (int it = 0; it < max_iter; ++it) {
        const auto g = p.gradient(u);
        // Nodes held at 0 by the constraint drop out of the preconditioner,
        // otherwise its coupling can point the projected step uphill.
        SymTridiagonal P = precond;
        std::vector<char> bound(n);
        for (std::size_t k = 0; k < n; ++k) bound[k] = u[k] <= 0.0 && g[k] > 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (bound[k] || bound[k + 1]) P.off[k] = 0.0;
        }
        const auto d = solve_tridiagonal(P, g);
        double step_norm = 0.0;
        for (std::size_t k = 0; k < n; ++k) step_norm = std::max(step_norm, std::abs(std::max(u[k] - d[k], 0.0) - u[k]));
        if (step_norm <= stationarity * std::max(inf_norm(u), 1e-300)) break;

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            double slope = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                trial[k] = std::max(u[k] - t * d[k], 0.0);
                slope += g[k] * (trial[k] - u[k]);
            }
            const double et = p.energy(trial);
            if (et <= e + 1e-4 * slope) {
                accepted = true;
                e = et;
                break;
            }
            t *= 0.5;
        }
        ++out.iterations;
        if (!accepted) break;
        u.swap(trial);
        if (inf_norm(u) > kDiverged) {
            out.diverged = true;
            break;
        }
    }
    return out;
}

struct NewtonOutcome {
    int iterations = 0;
    bool converged = false;
};

// A positive component left far below its own amplitude sits near a saddle
// where Newton pulls it to zero. Each run of nodes above `floor` is scaled by
// the exact minimiser s of the energy along s * u_run (neighbours fixed),
// b + s A - s^q B = 0, when that lifts it clearly.
void lift_components(const Problem& p, std::vector<double>& u, double floor) {
    const std::size_t n = p.n();
    const auto& K = p.lap.stiffness();
    const auto mass = p.mass();
    std::size_t i = 0;
    while (i < n) {
        if (!(u[i] > floor)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && u[j + 1] > floor) ++j;
        double A = 0.0, B = 0.0, b = 0.0;
        for (std::size_t k = i; k <= j; ++k) {
            A += K.diag[k] * u[k] * u[k];
            if (k < j) A += 2.0 * K.off[k] * u[k] * u[k + 1];
            B += mass[k] * p.a[k] * std::pow(u[k], p.q + 1.0);
        }
        if (i > 0) b += K.off[i - 1] * u[i - 1] * u[i];
        if (j + 1 < n) b += K.off[j] * u[j] * u[j + 1];
        if (A > 0.0) {
            const double s = scalar_root(A, B, p.q, -b);
            if (s > 1.5 && std::isfinite(s)) {
                for (std::size_t k = i; k <= j; ++k) u[k] *= s;
            }
        }
        i = j + 1;
    }
}

// Active-set Newton: nodes above the threshold take a joint Newton step,
// every other node is relaxed on its own by an exact scalar solve.
NewtonOutcome active_set_newton(const Problem& p, std::vector<double>& u, double tol, double theta_act,
                                int max_newton) {
    NewtonOutcome out;
    const std::size_t n = p.n();
    const auto& K = p.lap.stiffness();
    const auto mass = p.mass();
    std::vector<double> trial(n);

    auto merit = [&](std::span<const double> v, const std::vector<char>& active) {
        const auto g = p.gradient(v);
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (active[k]) s += g[k] * g[k] / mass[k];
        }
        return s;
    };

    // Aim a decade below tol; stop at tol once progress stalls.
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_newton; ++it) {
        const double unorm = inf_norm(u);
        const double scale = std::max(1.0, unorm);
        const double res = p.residual_inf(u);
        if (res <= 0.1 * tol * scale || (res <= tol * scale && res > 0.5 * previous)) {
            out.converged = true;
            break;
        }
        previous = res;
        if (unorm == 0.0) break;
        ++out.iterations;

        lift_components(p, u, theta_act * unorm);

        // Small nodes, and nodes where the local Jacobian entry is not
        // positive (tiny u with a > 0), are left to the scalar relaxation.
        SymTridiagonal J;
        J.diag.resize(n);
        J.off.assign(n > 0 ? n - 1 : 0, 0.0);
        std::vector<char> active(n);
        for (std::size_t k = 0; k < n; ++k) {
            J.diag[k] = u[k] > theta_act * unorm ? K.diag[k] - mass[k] * p.q * p.a[k] * std::pow(u[k], p.q - 1.0) : 0.0;
            active[k] = J.diag[k] > 0.0;
        }
        std::vector<double> rhs(n, 0.0);
        const auto g = p.gradient(u);
        for (std::size_t k = 0; k < n; ++k) {
            if (active[k]) {
                rhs[k] = -g[k];
            } else {
                J.diag[k] = 1.0;
            }
            if (k + 1 < n && active[k] && active[k + 1]) J.off[k] = K.off[k];
        }
        const auto d = solve_tridiagonal(J, rhs);

        const double m0 = merit(u, active);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t k = 0; k < n; ++k) {
                trial[k] = active[k] ? std::max(u[k] + t * d[k], 0.1 * u[k]) : u[k];
            }
            if (std::all_of(trial.begin(), trial.end(), [](double v) { return std::isfinite(v); }) &&
                merit(trial, active) < m0) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (accepted) u.swap(trial);

        // Nonlinear Gauss-Seidel on the inactive nodes, both directions. A
        // zero next to a positive node is not stationary and gets lifted.
        const bool any_inactive = std::any_of(active.begin(), active.end(), [](char c) { return !c; });
        if (any_inactive) {
            for (int sweep = 0; sweep < 4; ++sweep) {
                auto relax = [&](std::size_t k) {
                    if (active[k]) return;
                    double b = 0.0;
                    if (k > 0) b -= K.off[k - 1] * u[k - 1];
                    if (k + 1 < n) b -= K.off[k] * u[k + 1];
                    u[k] = scalar_root(K.diag[k], mass[k] * p.a[k], p.q, b);
                };
                for (std::size_t k = 0; k < n; ++k) relax(k);
                for (std::size_t k = n; k-- > 0;) relax(k);
            }
        } else if (!accepted) {
            break;
        }
    }
    if (!out.converged) out.converged = p.residual_inf(u) <= tol * std::max(1.0, inf_norm(u));
    return out;
}

// Best multiple of u along its ray: argmin_s E(s u) for the energy's two terms.
void rescale_on_ray(const Problem& p, std::vector<double>& u) {
    const auto ku = p.lap.apply_stiffness(u);
    double A = 0.0, B = 0.0;
    for (std::size_t k = 0; k < p.n(); ++k) {
        A += u[k] * ku[k];
        B += p.mass()[k] * p.a[k] * pos_pow(u[k], p.q + 1.0);
    }
    if (A > 0.0 && B > 0.0) {
        const double s = std::pow(B / A, 1.0 / (1.0 - p.q));
        if (std::isfinite(s) && s > 0.0) {
            for (double& v : u) v *= s;
        }
    }
}

SymTridiagonal preconditioner(const Problem& p) {
    SymTridiagonal P = p.lap.stiffness();
    if (p.lap.bc() == BoundaryCondition::Neumann) {
        const double L = p.lap.grid().hi() - p.lap.grid().lo();
        const double sigma = 1.0 / (L * L);
        for (std::size_t k = 0; k < p.n(); ++k) P.diag[k] += sigma * p.mass()[k];
    }
    return P;
}

struct StartOutcome {
    std::vector<double> u;
    double residual = 0.0;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
};

StartOutcome run_start(const Problem& p, const SymTridiagonal& precond, std::vector<double> u,
                       const SolverOptions& opts) {
    for (double& v : u) v = std::max(v, 0.0);
    StartOutcome out;
    const DescentOutcome first = projected_descent(p, precond, u, std::min(opts.max_iter, 300), 1e-4);
    out.iterations = first.iterations;
    if (!first.diverged) {
        lift_components(p, u, 0.0);
        NewtonOutcome nw = active_set_newton(p, u, opts.tol_res, opts.active_threshold, opts.max_newton);
        out.iterations += nw.iterations;
        if (!nw.converged) {
            // Newton started too far out: tighten the descent and try once more.
            const DescentOutcome second = projected_descent(p, precond, u, opts.max_iter, 1e-9);
            out.iterations += second.iterations;
            if (!second.diverged) {
                nw = active_set_newton(p, u, opts.tol_res, opts.active_threshold, opts.max_newton);
                out.iterations += nw.iterations;
            }
        }
        out.converged = nw.converged;
    }
    for (double& v : u) {
        if (!std::isfinite(v)) v = 0.0;
    }
    out.residual = p.residual_inf(u);
    out.energy = p.energy(u);
    out.u = std::move(u);
    return out;
}

std::vector<double> positive_set_poisson(const Problem& p) {
    const std::size_t n = p.n();
    const auto& K = p.lap.stiffness();
    SymTridiagonal T{K.diag, K.off};
    std::vector<double> rhs(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (p.a[k] > 0.0) {
            rhs[k] = p.mass()[k] * p.a[k];
        } else {
            T.diag[k] = 1.0;
            if (k > 0) T.off[k - 1] = 0.0;
            if (k + 1 < n) T.off[k] = 0.0;
        }
    }
    auto v = solve_tridiagonal(T, rhs);
    for (double& x : v) x = std::max(x, 0.0);
    return v;
}

void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
}

}  // namespace

double energy(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc) {
    if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1]");
    require_same_grid(a, u, "energy: a and u live on different grids");
    const Problem p(q, a, bc);
    return p.energy(p.lap.restrict(u));
}

ScalarField residual(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc) {
    require_same_grid(a, u, "residual: a and u live on different grids");
    const Problem p(q, a, bc);
    const auto uu = p.lap.restrict(u);
    auto g = p.gradient(uu);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] /= p.mass()[k];
    ScalarField out = p.lap.extend(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!p.lap.is_unknown(i)) out[i] = u[i];
    }
    return out;
}

double residual_inf(double q, const ScalarField& a, const ScalarField& u, BoundaryCondition bc) {
    return residual(q, a, u, bc).max_abs();
}

SolveResult solve_from(double q, const ScalarField& a, BoundaryCondition bc, const ScalarField& guess,
                       const SolverOptions& opts) {
    check_q(q);
    require_same_grid(a, guess, "solve_from: a and the guess live on different grids");
    const Problem p(q, a, bc);
    const SymTridiagonal precond = preconditioner(p);
    StartOutcome s = run_start(p, precond, p.lap.restrict(guess), opts);
    SolveResult r{p.lap.extend(s.u), 0.0, s.energy, 1, s.iterations, s.converged, std::nullopt, {}, {}};
    r.residual_inf = residual_inf(q, a, r.u, bc);
    if (r.converged) r.candidates.push_back(r.u);
    return r;
}

SolveResult ground_state(double q, const ScalarField& a, BoundaryCondition bc, const SolverOptions& opts) {
    check_q(q);
    if (!(opts.tol_res > 0.0) || !(opts.active_threshold > 0.0) || opts.max_starts < 1) {
        throw Error(ErrorKind::InvalidArgument, "solver tolerances must be positive and max_starts >= 1");
    }
    const Problem p(q, a, bc);
    const Grid& grid = a.grid();
    const std::size_t n = p.n();

    if (std::none_of(p.a.begin(), p.a.end(), [](double v) { return v > 0.0; })) {
        // a <= 0: the energy is nonnegative and vanishes only at u = 0.
        SolveResult r{ScalarField(grid), 0.0, 0.0, 0, 0, true, std::nullopt, "weight has no positive part", {}};
        r.candidates.push_back(r.u);
        return r;
    }

    if (bc == BoundaryCondition::Neumann) {
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) total += p.mass()[k] * p.a[k];
        if (total > 0.0) {
            // E(c) = -c^{q+1}/(q+1) sum m a along the constants: no minimiser.
            SolveResult r{ScalarField(grid), 0.0, 0.0, 0, 0, false, std::nullopt,
                          "energy unbounded below along constants (integral of a > 0)", {}};
            r.residual_inf = residual_inf(q, a, r.u, bc);
            return r;
        }
    }

    std::vector<std::vector<double>> starts;
    if (bc == BoundaryCondition::Dirichlet) starts.push_back(p.lap.restrict(solve_poisson(positive_part(a))));
    // Poisson solve of a^+ on {a > 0} with zero values where a <= 0: smooth,
    // and its ray reaches negative energy even when S(a^+) leaks into a deep
    // negative region.
    const auto on_positive = positive_set_poisson(p);
    starts.push_back(on_positive);
    try {
        const EigenPair ep = principal_eigenpair(a, bc);
        starts.push_back(p.lap.restrict(ep.phi));
    } catch (const Error&) {
        // No positive principal eigenvalue (Neumann with integral of a >= 0).
    }
    for (const auto& extra : opts.extra_starts) {
        require_same_grid(a, extra, "extra start lives on another grid");
        starts.push_back(p.lap.restrict(extra));
    }
    // Random starts: a smooth random modulation of the positive-set profile, with whole positive components switched off at random so that
    // other local minima get a chance.
    const double lo_x = grid.lo(), len = grid.hi() - grid.lo();
    for (std::size_t s = 0; starts.size() < static_cast<std::size_t>(opts.max_starts); ++s) {
        std::mt19937_64 rng(opts.seed + s);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        double coef[4], phase[4];
        for (int j = 0; j < 4; ++j) {
            coef[j] = unif(rng) / (j + 1);
            phase[j] = std::numbers::pi * unif(rng);
        }
        std::vector<double> u(n, 0.0);
        bool keep = unif(rng) > -0.5;
        bool any = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (p.a[k] <= 0.0) {
                if (k + 1 < n && p.a[k + 1] > 0.0) keep = unif(rng) > -0.5;
                continue;
            }
            if (!keep) continue;
            const double x = (grid.x(k + p.lap.first()) - lo_x) / len;
            double xi = 0.0;
            for (int j = 0; j < 4; ++j) xi += coef[j] * std::cos((j + 1) * std::numbers::pi * x + phase[j]);
            u[k] = on_positive[k] * std::exp(xi);
            any = any || u[k] > 0.0;
        }
        if (!any) {
            u = on_positive;
        }
        starts.push_back(std::move(u));
    }
    if (starts.size() > static_cast<std::size_t>(opts.max_starts)) starts.resize(opts.max_starts);

    const SymTridiagonal precond = preconditioner(p);
    std::vector<StartOutcome> outcomes;
    outcomes.reserve(starts.size());
    for (auto& s : starts) {
        rescale_on_ray(p, s);
        outcomes.push_back(run_start(p, precond, std::move(s), opts));
    }

    SolveResult r{ScalarField(grid), 0.0, 0.0, static_cast<int>(outcomes.size()), 0, false, std::nullopt, {}, {}};
    int best = -1;
    int fallback = -1;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        r.iterations += outcomes[i].iterations;
        const auto& o = outcomes[i];
        if (o.converged) {
            if (best < 0 || o.energy < outcomes[best].energy) best = static_cast<int>(i);
        } else if (fallback < 0 || o.residual < outcomes[fallback].residual) {
            fallback = static_cast<int>(i);
        }
    }
    const int pick = best >= 0 ? best : fallback;
    r.u = p.lap.extend(outcomes[pick].u);
    r.energy = outcomes[pick].energy;
    r.converged = best >= 0;
    r.residual_inf = residual_inf(q, a, r.u, bc);
    if (!r.converged) r.note = "no start converged; returning the smallest residual";

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].converged) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return outcomes[x].energy < outcomes[y].energy; });
    for (std::size_t i : order) {
        const auto& u = outcomes[i].u;
        const double un = std::max(inf_norm(u), 1e-300);
        const bool duplicate = std::any_of(r.candidates.begin(), r.candidates.end(), [&](const ScalarField& c) {
            double gap = 0.0;
            for (std::size_t k = 0; k < n; ++k) gap = std::max(gap, std::abs(c[k + p.lap.first()] - u[k]));
            return gap <= 1e-6 * un;
        });
        if (!duplicate) r.candidates.push_back(p.lap.extend(u));
    }
    return r;
}

namespace {

double residual_scale(const ScalarField& a, const ScalarField& super, double q) {
    const double s = super.max_abs();
    return std::max({1.0, s, a.max_abs() * std::pow(s, q)});
}

}  // namespace

MonotoneResult monotone_iterate(double q, const ScalarField& a, BoundaryCondition bc, const ScalarField& sub,
                                const ScalarField& super, const SolverOptions& opts, const MonotoneOptions& mopts) {
    check_q(q);
    require_same_grid(a, sub, "monotone_iterate: a and sub live on different grids");
    require_same_grid(a, super, "monotone_iterate: a and super live on different grids");
    const double scale = residual_scale(a, super, q);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub[i] > super[i] + mopts.order_slack * scale) {
            throw Error(ErrorKind::OrderViolation, "sub exceeds super at node " + std::to_string(i));
        }
    }
    if (sub.min() < 0.0) throw Error(ErrorKind::NegativeValues, "the subsolution must be nonnegative");
    const ScalarField rsub = residual(q, a, sub, bc);
    const ScalarField rsup = residual(q, a, super, bc);
    const Problem p(q, a, bc);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (!p.lap.is_unknown(i)) continue;
        if (rsub[i] > mopts.order_slack * scale) {
            throw Error(ErrorKind::NotSubsolution, "residual of sub is positive at node " + std::to_string(i));
        }
        if (rsup[i] < -mopts.order_slack * scale) {
            throw Error(ErrorKind::NotSupersolution, "residual of super is negative at node " + std::to_string(i));
        }
    }

    const auto lo = p.lap.restrict(sub);
    auto u = p.lap.restrict(super);
    const std::size_t n = p.n();
    MonotoneResult out;

    double m_pos = std::numeric_limits<double>::infinity();
    for (double v : lo) {
        if (v > 0.0) m_pos = std::min(m_pos, v);
        else out.positive_sub = false;
    }
    if (!std::isfinite(m_pos)) m_pos = std::max(inf_norm(u), 1.0);
    const double amax = inf_norm(p.a);
    // T(u) = a u^q + M u is nondecreasing on [m_pos, inf) once M covers the
    // negative part of a; max |a| covers both signs.
    out.shift = std::max(q * amax * std::pow(m_pos, q - 1.0), 1e-12);

    SymTridiagonal shifted = p.lap.stiffness();
    for (std::size_t k = 0; k < n; ++k) shifted.diag[k] += out.shift * p.mass()[k];
    const TridiagonalFactor factor(shifted);

    const double stop = mopts.tol * std::max(1.0, inf_norm(u));
    // A subsolution with zeros gives no lower bound for u^{q-1}, so the map is
    // not monotone near 0; the iteration then only prepares a warm start.
    const int budget = out.positive_sub ? mopts.max_iter : std::min(mopts.max_iter, mopts.warm_iter);
    int it = 0;
    bool settled = false;
    std::vector<double> rhs(n);
    for (; it < budget; ++it) {
        for (std::size_t k = 0; k < n; ++k) {
            rhs[k] = p.mass()[k] * (p.a[k] * pos_pow(u[k], q) + out.shift * u[k]);
        }
        auto next = factor.solve(rhs);
        double diff = 0.0;
        bool violated = false;
        for (std::size_t k = 0; k < n; ++k) {
            next[k] = std::max(next[k], 0.0);
            violated = violated || next[k] > u[k] + mopts.order_slack * scale;
            diff = std::max(diff, std::abs(next[k] - u[k]));
        }
        if (violated) ++out.monotonicity_violations;
        u.swap(next);
        if (diff <= stop) {
            ++it;
            settled = true;
            break;
        }
    }

    SolveResult r{p.lap.extend(u), 0.0, 0.0, 1, it, false, std::nullopt, {}, {}};
    r.residual_inf = residual_inf(q, a, r.u, bc);
    bool finished = settled;
    if ((settled || !out.positive_sub) && r.residual_inf > opts.tol_res * std::max(1.0, r.u.max_abs())) {
        // Slow contraction stops the increment test short of the residual
        // tolerance; Newton from the monotone iterate finishes the job.
        SolveResult polished = solve_from(q, a, bc, r.u, opts);
        bool inside = polished.converged;
        for (std::size_t i = 0; inside && i < sub.size(); ++i) {
            inside = polished.u[i] >= sub[i] - 1e-6 * scale && polished.u[i] <= super[i] + 1e-6 * scale;
        }
        if (inside) {
            polished.iterations += it;
            r = std::move(polished);
            out.newton_finish = true;
            finished = true;
        }
    }
    r.converged = finished && r.residual_inf <= opts.tol_res * std::max(1.0, r.u.max_abs());
    r.energy = energy(q, a, r.u, bc);
    r.candidates.clear();
    if (r.converged) r.candidates.push_back(r.u);

    if (!r.converged && (!out.positive_sub || out.monotonicity_violations > 0)) {
        SolverOptions warm = opts;
        warm.extra_starts.push_back(r.u);
        r = ground_state(q, a, bc, warm);
        r.note = "monotone iteration failed; ground state used";
        out.fell_back = true;
    }
    out.result = std::move(r);
    return out;
}

Barrier build_supersolution(const ScalarField& a, double q) {
    check_q(q);
    const ScalarField ap = positive_part(a);
    if (ap.max_abs() == 0.0) throw Error(ErrorKind::ZeroField, "the supersolution needs a^+ not identically 0");
    const ScalarField z = solve_poisson(ap);
    Barrier b;
    b.scale = 1.1 * std::pow(z.max_abs(), q / (1.0 - q));
    b.field = scaled(z, b.scale);
    const ScalarField r = residual(q, a, b.field, BoundaryCondition::Dirichlet);
    b.worst_residual = r.min();
    b.verified = b.worst_residual >= -1e-12 * residual_scale(a, b.field, q);
    return b;
}

std::vector<std::size_t> ball_nodes(const Grid& grid, const Ball& ball, bool closed) {
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(grid.x(i) - ball.center);
        if (d < ball.radius || (closed && d <= ball.radius)) nodes.push_back(i);
    }
    return nodes;
}

Barrier build_subsolution_ball(const ScalarField& a, double q, const Ball& ball) {
    check_q(q);
    const Grid& grid = a.grid();
    if (!(ball.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
    if (grid.is_radial() && ball.center != 0.0) {
        throw Error(ErrorKind::InvalidArgument, "balls on a radial grid must be centred at the origin");
    }
    DiscreteLaplacian lap(grid, BoundaryCondition::Dirichlet);
    std::vector<std::size_t> nodes;
    for (std::size_t i : ball_nodes(grid, ball)) {
        if (lap.is_unknown(i)) nodes.push_back(i);
    }
    if (nodes.empty()) throw Error(ErrorKind::BallNotPositive, "the ball contains no grid node");
    for (std::size_t j = 1; j < nodes.size(); ++j) {
        if (nodes[j] != nodes[j - 1] + 1) throw Error(ErrorKind::InvalidArgument, "ball nodes are not contiguous");
    }
    double a0 = std::numeric_limits<double>::infinity();
    for (std::size_t i : nodes) a0 = std::min(a0, a[i]);
    if (!(a0 > 0.0)) throw Error(ErrorKind::BallNotPositive, "a is not bounded below by a positive constant on the ball");

    // The ball's own Dirichlet problem: rows and columns of K on the ball nodes.
    const std::size_t k0 = nodes.front() - lap.first();
    const std::size_t nb = nodes.size();
    SymTridiagonal kb;
    kb.diag.assign(lap.stiffness().diag.begin() + k0, lap.stiffness().diag.begin() + k0 + nb);
    kb.off.assign(lap.stiffness().off.begin() + k0, lap.stiffness().off.begin() + k0 + nb - 1);
    std::vector<double> mb(lap.mass().begin() + k0, lap.mass().begin() + k0 + nb);
    const PencilEigen pe = principal_pencil_eigen(kb, mb, 1e-8);

    Barrier b;
    b.eigenvalue = pe.mu;
    b.scale = 0.9 * std::pow(a0 / pe.mu, 1.0 / (1.0 - q));
    b.field = ScalarField(grid);
    for (std::size_t j = 0; j < nb; ++j) b.field[nodes[j]] = b.scale * std::max(pe.vec[j], 0.0);
    const ScalarField r = residual(q, a, b.field, BoundaryCondition::Dirichlet);
    b.worst_residual = r.max();
    b.verified = b.worst_residual <= 1e-12 * residual_scale(a, b.field, q);
    return b;
}

}  // namespace sublin
