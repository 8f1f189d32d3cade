#include "sublin/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sublin/analysis.hpp"
#include "sublin/errors.hpp"

namespace sublin::oracles {

namespace {

void require_zero_pi(const Grid& grid) {
    const auto* line = std::get_if<LineGeometry>(&grid.geometry());
    if (line == nullptr || line->lo != 0.0 || std::abs(line->hi - std::numbers::pi) > 1e-12) {
        throw Error(ErrorKind::DomainMismatch, "the closed-form example lives on [0, pi]");
    }
}

}  // namespace

OraclePair exact_example(double q, const Grid& grid) {
    require_zero_pi(grid);
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
    const double r = 2.0 / (1.0 - q);
    const double amp = std::pow(r, 1.0 - 2.0 / r);
    ScalarField a = sample([&](double x) { return amp * (1.0 - r * std::cos(x) * std::cos(x)); }, grid);
    ScalarField u = sample([&](double x) { return std::pow(std::max(std::sin(x), 0.0), r) / r; }, grid);
    // sin(pi) is not exactly zero in floating point
    u[0] = 0.0;
    u[grid.size() - 1] = 0.0;
    return {std::move(a), std::move(u), "sin^r x / r with r = 2/(1-q)"};
}

ScalarField exact_poisson_reference(const Grid& grid) {
    require_zero_pi(grid);
    return sample([](double x) { return x * x - std::numbers::pi * x + 1.0 - std::cos(2.0 * x); }, grid);
}

ScalarField barrier_w(double x0, double a_lo, double q, int dim, const Grid& grid) {
    if (!(a_lo > 0.0)) throw Error(ErrorKind::InvalidArgument, "barrier needs a_lo > 0");
    const double c = c_nq(dim, q);
    return sample(
        [&](double x) {
            const double d = x - x0;
            return std::pow(c * a_lo * d * d, 1.0 / (1.0 - q));
        },
        grid);
}

namespace {

// Own bookkeeping of the discrete energy: K and the masses are the problem
// definition, everything else is recomputed here.
struct Plain {
    std::vector<double> kd, ko, m, a;
    double q;

    double energy(const std::vector<double>& u) const {
        double quad = 0.0, pot = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            quad += kd[i] * u[i] * u[i];
            if (i + 1 < u.size()) quad += 2.0 * ko[i] * u[i] * u[i + 1];
            pot += m[i] * a[i] * std::pow(std::max(u[i], 0.0), q + 1.0);
        }
        return 0.5 * quad - pot / (q + 1.0);
    }

    std::vector<double> grad(const std::vector<double>& u) const {
        const std::size_t n = u.size();
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = kd[i] * u[i];
            if (i > 0) s += ko[i - 1] * u[i - 1];
            if (i + 1 < n) s += ko[i] * u[i + 1];
            g[i] = s - m[i] * a[i] * std::pow(std::max(u[i], 0.0), q);
        }
        return g;
    }

    double stationarity(const std::vector<double>& u, const std::vector<double>& g) const {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double gi = g[i] / m[i];
            s = std::max(s, std::abs(u[i] > 0.0 ? gi : std::min(gi, 0.0)));
        }
        return s;
    }
};

// Dense Newton on the positive nodes, Gaussian elimination with partial
// pivoting, projected backtracking on the energy.
void newton_polish(const Plain& p, std::vector<double>& u, double& e, std::vector<double>& g, double& stat,
                   double tol) {
    const std::size_t n = u.size();
    std::vector<double> trial(n);
    for (int it = 0; it < 60 && stat > tol * std::max(1.0, *std::max_element(u.begin(), u.end())); ++it) {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] > 0.0) free.push_back(i);
        }
        const std::size_t f = free.size();
        if (f == 0) return;
        std::vector<double> h(f * (f + 1), 0.0);  // augmented [H | -g]
        for (std::size_t r = 0; r < f; ++r) {
            const std::size_t i = free[r];
            for (std::size_t c = 0; c < f; ++c) {
                const std::size_t j = free[c];
                double v = 0.0;
                if (i == j) v = p.kd[i] - p.q * p.m[i] * p.a[i] * std::pow(u[i], p.q - 1.0);
                else if (j == i + 1) v = p.ko[i];
                else if (i == j + 1) v = p.ko[j];
                h[r * (f + 1) + c] = v;
            }
            h[r * (f + 1) + f] = -g[i];
        }
        bool singular = false;
        for (std::size_t c = 0; c < f && !singular; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < f; ++r) {
                if (std::abs(h[r * (f + 1) + c]) > std::abs(h[piv * (f + 1) + c])) piv = r;
            }
            if (!(std::abs(h[piv * (f + 1) + c]) > 0.0) || !std::isfinite(h[piv * (f + 1) + c])) {
                singular = true;
                break;
            }
            if (piv != c) {
                for (std::size_t k = 0; k <= f; ++k) std::swap(h[c * (f + 1) + k], h[piv * (f + 1) + k]);
            }
            for (std::size_t r = c + 1; r < f; ++r) {
                const double l = h[r * (f + 1) + c] / h[c * (f + 1) + c];
                if (l == 0.0) continue;
                for (std::size_t k = c; k <= f; ++k) h[r * (f + 1) + k] -= l * h[c * (f + 1) + k];
            }
        }
        if (singular) return;
        std::vector<double> d(n, 0.0);
        for (std::size_t r = f; r-- > 0;) {
            double s = h[r * (f + 1) + f];
            for (std::size_t k = r + 1; k < f; ++k) s -= h[r * (f + 1) + k] * d[free[k]];
            d[free[r]] = s / h[r * (f + 1) + r];
        }
        double t = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            double slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::max(u[i] + t * d[i], 0.0);
                slope += g[i] * (trial[i] - u[i]);
            }
            if (!(slope < 0.0)) break;
            const double et = p.energy(trial);
            if (et <= e + 1e-4 * slope) {
                ok = true;
                e = et;
                break;
            }
            t *= 0.5;
        }
        if (!ok) return;
        u.swap(trial);
        g = p.grad(u);
        stat = p.stationarity(u, g);
    }
}

}  // namespace

BruteForceResult brute_force_ground_state(double q, const ScalarField& a, BoundaryCondition bc, int starts,
                                          std::uint64_t seed, double tol) {
    if (a.grid().n_interior() > 63) throw Error(ErrorKind::InvalidArgument, "brute force is limited to n <= 63");
    DiscreteLaplacian lap(a.grid(), bc);
    Plain p{lap.stiffness().diag, lap.stiffness().off, {lap.mass().begin(), lap.mass().end()}, lap.restrict(a), q};
    const std::size_t n = p.a.size();

    BruteForceResult best{ScalarField(a.grid()), 0.0, 0.0, true, starts};
    std::vector<double> best_u(n, 0.0);
    best.energy = 0.0;
    if (std::none_of(p.a.begin(), p.a.end(), [](double v) { return v > 0.0; })) return best;
    double best_stat = 0.0;
    bool best_set = false;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> u(n);
        const double keep = (s % 2 == 0) ? 1.0 : 0.6;
        for (double& v : u) v = unif(rng) < keep ? unif(rng) : 0.0;
        // Best point on the ray through the start.
        {
            double A = 0.0, B = 0.0;
            const auto g0 = p.grad(u);
            for (std::size_t i = 0; i < n; ++i) {
                const double pot = p.m[i] * p.a[i] * std::pow(u[i], q + 1.0);
                B += pot;
                A += u[i] * g0[i] + pot;
            }
            if (A > 0.0 && B > 0.0) {
                const double t = std::pow(B / A, 1.0 / (1.0 - q));
                for (double& v : u) v *= t;
            }
        }
        double e = p.energy(u);
        auto g = p.grad(u);
        double step = 1.0;
        double stat = p.stationarity(u, g);
        std::vector<double> trial(n);
        int flat = 0;  // iterations in a row without a visible energy decrease
        for (int it = 0; it < 20000 && flat < 200 && stat > tol * std::max(1.0, *std::max_element(u.begin(), u.end()));
             ++it) {
            const double e_before = e;
            double t = step;
            bool ok = false;
            for (int ls = 0; ls < 80; ++ls) {
                double slope = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    trial[i] = std::max(u[i] - t * g[i] / p.m[i], 0.0);
                    slope += g[i] * (trial[i] - u[i]);
                }
                const double et = p.energy(trial);
                if (et <= e + 1e-4 * slope) {
                    ok = true;
                    e = et;
                    break;
                }
                t *= 0.5;
            }
            if (!ok) break;
            flat = (e_before - e > 1e-15 * std::max(1.0, std::abs(e))) ? 0 : flat + 1;
            const auto gn = p.grad(trial);
            // Barzilai-Borwein trial step for the next iteration (mass metric).
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double di = trial[i] - u[i];
                ss += p.m[i] * di * di;
                sy += di * (gn[i] - g[i]);
            }
            step = (sy > 0.0) ? std::clamp(ss / sy, 1e-12, 1e12) : 2.0 * t;
            u.swap(trial);
            g = gn;
            stat = p.stationarity(u, g);
        }
        newton_polish(p, u, e, g, stat, tol);
        if (!best_set || e < best.energy) {
            best.energy = e;
            best_u = u;
            best_stat = stat;
            best_set = true;
        }
    }
    best.u = lap.extend(best_u);
    best.stationarity = best_stat;
    best.converged = best_stat <= tol * std::max(1.0, best.u.max_abs());
    return best;
}

}  // namespace sublin::oracles
