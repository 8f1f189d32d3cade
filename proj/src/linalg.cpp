#include "sublin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sublin/errors.hpp"

namespace sublin {

std::vector<double> solve_tridiagonal(const SymTridiagonal& matrix, std::span<const double> rhs) {
    return TridiagonalFactor(matrix).solve(rhs);
}

TridiagonalFactor::TridiagonalFactor(const SymTridiagonal& matrix)
    : sub_(matrix.off), pivot_(matrix.size()) {
    const std::size_t n = matrix.size();
    if (n == 0) return;
    pivot_[0] = matrix.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        pivot_[i] = matrix.diag[i] - sub_[i - 1] * sub_[i - 1] / pivot_[i - 1];
    }
}

std::vector<double> TridiagonalFactor::solve(std::span<const double> rhs) const {
    const std::size_t n = pivot_.size();
    std::vector<double> y(rhs.begin(), rhs.end());
    // L y = rhs with L unit lower bidiagonal, L(i, i-1) = off / pivot(i-1).
    for (std::size_t i = 1; i < n; ++i) y[i] -= sub_[i - 1] / pivot_[i - 1] * y[i - 1];
    for (std::size_t i = 0; i < n; ++i) y[i] /= pivot_[i];
    for (std::size_t i = n; i-- > 1;) y[i - 1] -= sub_[i - 1] / pivot_[i - 1] * y[i];
    return y;
}

int negative_pivot_count(const SymTridiagonal& matrix, std::span<const double> weight, double shift) {
    const std::size_t n = matrix.size();
    constexpr double tiny = std::numeric_limits<double>::min();
    int count = 0;
    double pivot = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = matrix.diag[i] - shift * weight[i];
        if (i > 0) d -= matrix.off[i - 1] * matrix.off[i - 1] / pivot;
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
        pivot = d;
    }
    return count;
}

ScalarField solve_poisson(const ScalarField& f, BoundaryCondition bc) {
    if (bc != BoundaryCondition::Dirichlet) {
        throw Error(ErrorKind::UnsupportedBC, "the Poisson solution operator is defined for Dirichlet data only");
    }
    DiscreteLaplacian lap(f.grid(), bc);
    auto rhs = lap.restrict(f);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] *= lap.mass()[k];
    return lap.extend(solve_tridiagonal(lap.stiffness(), rhs));
}

double operator_norm_S(const Grid& grid) {
    ScalarField one(grid, std::vector<double>(grid.size(), 1.0));
    return solve_poisson(one).max_abs();
}

PencilEigen principal_pencil_eigen(const SymTridiagonal& stiffness, std::span<const double> weight,
                                   double mu_floor) {
    const std::size_t n = stiffness.size();
    if (std::none_of(weight.begin(), weight.end(), [](double w) { return w > 0.0; })) {
        throw Error(ErrorKind::NoPositiveEigenvalue, "weight is nonpositive everywhere");
    }
    PencilEigen out;
    double lo = mu_floor;
    if (negative_pivot_count(stiffness, weight, lo) != 0) {
        throw Error(ErrorKind::NoPositiveEigenvalue,
                    "an eigenvalue lies below the bracket floor (Neumann problems need integral of a < 0)");
    }
    double hi = std::max(1.0, 2.0 * lo);
    int count_hi = negative_pivot_count(stiffness, weight, hi);
    while (count_hi == 0) {
        hi *= 2.0;
        if (hi > 1e300) throw Error(ErrorKind::NonconvergedBisection, "no inertia change below 1e300");
        count_hi = negative_pivot_count(stiffness, weight, hi);
    }
    int steps = 0;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int c = negative_pivot_count(stiffness, weight, mid);
        if (c > count_hi) out.inertia_monotone = false;
        if (c >= 1) {
            hi = mid;
            count_hi = c;
        } else {
            lo = mid;
        }
        if (++steps > 400) throw Error(ErrorKind::NonconvergedBisection, "bisection did not converge");
    }
    out.mu = 0.5 * (lo + hi);
    out.bisection_steps = steps;

    // Inverse iteration at the lower end of the bracket, where K - lo W is
    // positive definite and nearly singular along the principal direction.
    SymTridiagonal shifted = stiffness;
    for (std::size_t i = 0; i < n; ++i) shifted.diag[i] -= lo * weight[i];
    TridiagonalFactor factor(shifted);
    std::vector<double> x(n, 1.0);
    for (int it = 0; it < 4; ++it) {
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = std::abs(weight[i]) * x[i];
        x = factor.solve(rhs);
        double scale = 0.0;
        for (double v : x) scale = std::abs(v) > std::abs(scale) ? v : scale;
        for (double& v : x) v /= scale;
    }
    out.vec = std::move(x);
    return out;
}

EigenPair principal_eigenpair(const ScalarField& a, BoundaryCondition bc) {
    DiscreteLaplacian lap(a.grid(), bc);
    const auto a_u = lap.restrict(a);
    std::vector<double> weight(a_u.size());
    for (std::size_t k = 0; k < weight.size(); ++k) weight[k] = lap.mass()[k] * a_u[k];

    const PencilEigen pe = principal_pencil_eigen(lap.stiffness(), weight, 1e-8);
    if (std::any_of(pe.vec.begin(), pe.vec.end(), [](double v) { return !(v > 0.0); })) {
        throw Error(ErrorKind::NonconvergedBisection, "principal eigenvector is not positive");
    }
    ScalarField phi = lap.extend(pe.vec);
    ScalarField sq = phi;
    for (double& v : sq.values()) v *= v;
    const double norm = std::sqrt(integrate(sq));
    for (double& v : phi.values()) v /= norm;

    EigenPair out{pe.mu, phi, 0.0, pe.bisection_steps, pe.inertia_monotone};
    const auto phi_u = lap.restrict(phi);
    const auto kphi = lap.apply_stiffness(phi_u);
    double res = 0.0;
    for (std::size_t k = 0; k < phi_u.size(); ++k) {
        res = std::max(res, std::abs(kphi[k] / lap.mass()[k] - pe.mu * a_u[k] * phi_u[k]));
    }
    out.residual_inf = res;
    return out;
}

LinearizedEigen linearized_eigenvalue(double q, const ScalarField& u, const ScalarField& a,
                                      BoundaryCondition bc, double theta_clamp) {
    require_same_grid(u, a, "linearized_eigenvalue: u and a live on different grids");
    const double unorm = u.max_abs();
    if (unorm == 0.0) throw Error(ErrorKind::ZeroField, "linearisation at u = 0 is undefined");

    DiscreteLaplacian lap(u.grid(), bc);
    const auto uu = lap.restrict(u);
    const auto au = lap.restrict(a);
    const auto mass = lap.mass();
    const std::size_t n = uu.size();
    const double floor_value = theta_clamp * unorm;

    LinearizedEigen out;
    out.theta_clamp = theta_clamp;
    SymTridiagonal sym;
    sym.diag.resize(n);
    sym.off.resize(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k < n; ++k) {
        double base = uu[k];
        if (base <= floor_value) {
            base = floor_value;
            ++out.clamped_nodes;
        }
        const double potential = q * au[k] * std::pow(base, q - 1.0);
        sym.diag[k] = lap.stiffness().diag[k] / mass[k] - potential;
        if (k + 1 < n) sym.off[k] = lap.stiffness().off[k] / std::sqrt(mass[k] * mass[k + 1]);
    }
    // Gershgorin bracket for the smallest eigenvalue.
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        double radius = 0.0;
        if (k > 0) radius += std::abs(sym.off[k - 1]);
        if (k + 1 < n) radius += std::abs(sym.off[k]);
        lo = std::min(lo, sym.diag[k] - radius);
        hi = std::min(hi, sym.diag[k]);
    }
    const std::vector<double> ones(n, 1.0);
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    lo = lo - 1e-12 * std::max(1.0, std::abs(lo));
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (negative_pivot_count(sym, ones, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.gamma1 = 0.5 * (lo + hi);
    return out;
}

}  // namespace sublin
