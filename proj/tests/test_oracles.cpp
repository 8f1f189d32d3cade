#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sublin/nonlinear.hpp"
#include "sublin/oracles.hpp"

using namespace sublin;
using std::numbers::pi;

TEST_CASE("closed-form example") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const auto ex = oracles::exact_example(0.5, g);
    CHECK(ex.u[1024] == doctest::Approx(0.25));
    CHECK(ex.a[1024] == doctest::Approx(2.0));
    CHECK(ex.a[0] == doctest::Approx(-6.0));
    for (double q : {0.1, 0.5, 0.9}) {
        const auto e = oracles::exact_example(q, g);
        CHECK(e.u[0] == 0.0);
        CHECK(e.u[g.size() - 1] == 0.0);
        // One-sided difference quotients vanish with h since r > 2.
        CHECK(e.u[1] / g.h() < 1e-3);
    }
}

TEST_CASE("poisson reference") {
    const Grid g(LineGeometry{0.0, pi}, 1023);
    const ScalarField s = oracles::exact_poisson_reference(g);
    CHECK(s[0] == doctest::Approx(0.0));
    CHECK(s[512] == doctest::Approx(2.0 - pi * pi / 4));
    double top = -1.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) top = std::max(top, s[i]);
    CHECK(top < 0.0);
}

TEST_CASE("barrier w") {
    const Grid g(LineGeometry{0.0, 4.0}, 399);
    const ScalarField w = oracles::barrier_w(2.0, 12.0, 0.5, 1, g);
    CHECK(w[200] == 0.0);
    CHECK(w[100] == doctest::Approx(1.0));
    // Here w = |x - x0|^4, whose second difference exceeds 12 |x - x0|^2 by 2 h^2.
    const ScalarField lap = apply_laplacian(w, BoundaryCondition::Dirichlet);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(lap[i] <= 12.0 * std::sqrt(w[i]) + 2.5 * g.h() * g.h());
}

TEST_CASE("brute force oracle") {
    const Grid g(LineGeometry{0.0, pi}, 31);
    const ScalarField neg = sample([](double x) { return -1.0 - std::sin(x); }, g);
    CHECK(oracles::brute_force_ground_state(0.4, neg, BoundaryCondition::Dirichlet).u.max_abs() == 0.0);

    const auto ex = oracles::exact_example(0.5, g);
    const auto bf = oracles::brute_force_ground_state(0.5, ex.a, BoundaryCondition::Dirichlet);
    CHECK(bf.energy <= energy(0.5, ex.a, ex.u, BoundaryCondition::Dirichlet));
    CHECK(bf.u.min() >= 0.0);
}

TEST_CASE("brute force agrees with the main solver on random weights") {
    const Grid g(LineGeometry{0.0, pi}, 31);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    int tried = 0;
    while (tried < 5) {
        const double c0 = 0.5 * d(rng), c1 = 2 * d(rng), c2 = 2 * d(rng), p = pi * d(rng);
        const ScalarField a = sample([&](double x) { return c0 + c1 * std::cos(x + p) + c2 * std::cos(2 * x); }, g);
        if (!(a.min() < 0 && a.max() > 0)) continue;
        ++tried;
        const auto bf = oracles::brute_force_ground_state(0.4, a, BoundaryCondition::Dirichlet);
        const SolveResult r = ground_state(0.4, a, BoundaryCondition::Dirichlet);
        CHECK(std::abs(r.energy - bf.energy) <= 1e-8 * std::max(1.0, std::abs(bf.energy)));
    }
}
