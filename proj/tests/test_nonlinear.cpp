#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"
#include "sublin/nonlinear.hpp"
#include "sublin/oracles.hpp"
#include "sublin/weights.hpp"

using namespace sublin;
using std::numbers::pi;

TEST_CASE("energy") {
    const Grid g(LineGeometry{0.0, pi}, 511);
    const auto ex = oracles::exact_example(0.5, g);
    CHECK(energy(0.5, ex.a, ScalarField(g), BoundaryCondition::Dirichlet) == 0.0);
    CHECK(energy(0.5, ex.a, ex.u, BoundaryCondition::Dirichlet) < 0.0);
    const ScalarField neg = sample([](double x) { return -1.0 - x; }, g);
    const ScalarField u = sample([](double x) { return std::sin(3 * x) * std::sin(3 * x); }, g);
    CHECK(energy(0.5, neg, u, BoundaryCondition::Dirichlet) > 0.0);
}

TEST_CASE("residual") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const auto ex = oracles::exact_example(0.5, g);
    CHECK(residual_inf(0.5, ex.a, ex.u, BoundaryCondition::Dirichlet) <= 5e-6);
    CHECK(residual(0.5, ex.a, ScalarField(g), BoundaryCondition::Dirichlet).max_abs() == 0.0);

    const Grid h(LineGeometry{0.0, 1.0}, 31);
    const ScalarField one = sample([](double) { return 1.0; }, h);
    for (double q : {0.2, 0.7}) {
        const ScalarField f = residual(q, one, one, BoundaryCondition::Neumann);
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(f[i] == doctest::Approx(-1.0));
    }
}

TEST_CASE("ground state of the closed-form example") {
    const Grid g(LineGeometry{0.0, pi}, 511);
    const auto ex = oracles::exact_example(0.5, g);
    SolverOptions opts;
    const SolveResult r = ground_state(0.5, ex.a, BoundaryCondition::Dirichlet, opts);
    CHECK(r.converged);
    CHECK(r.residual_inf <= opts.tol_res * std::max(1.0, r.u.max_abs()));
    CHECK(r.energy <= energy(0.5, ex.a, ex.u, BoundaryCondition::Dirichlet) + 1e-8);
    CHECK(r.u.min() >= 0.0);
}

TEST_CASE("nonpositive weight gives the trivial solution") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField a = sample([](double x) { return -std::sin(x); }, g);
    const SolveResult r = ground_state(0.4, a, BoundaryCondition::Dirichlet);
    CHECK(r.converged);
    CHECK(r.u.max_abs() == 0.0);
}

TEST_CASE("ground state is reproducible and seed independent") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField a = sample([](double x) { return std::cos(3 * x) + 0.2; }, g);
    SolverOptions o1, o2;
    o2.seed = 99;
    const SolveResult r1 = ground_state(0.4, a, BoundaryCondition::Dirichlet, o1);
    const SolveResult r1b = ground_state(0.4, a, BoundaryCondition::Dirichlet, o1);
    const SolveResult r2 = ground_state(0.4, a, BoundaryCondition::Dirichlet, o2);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(r1.u[i] == r1b.u[i]);
    CHECK(r1.energy == doctest::Approx(r2.energy).epsilon(1e-10));
}

TEST_CASE("neumann with positive mean weight is unbounded") {
    const Grid g(LineGeometry{0.0, pi}, 63);
    const ScalarField a = sample([](double x) { return std::cos(x) + 0.3; }, g);
    const SolveResult r = ground_state(0.5, a, BoundaryCondition::Neumann);
    CHECK(!r.converged);
    CHECK(!r.note.empty());
}

TEST_CASE("invalid q") {
    const Grid g(LineGeometry{0.0, pi}, 31);
    const ScalarField a = sample([](double) { return 1.0; }, g);
    CHECK_THROWS_AS(ground_state(1.0, a, BoundaryCondition::Dirichlet), Error);
    CHECK_THROWS_AS(ground_state(0.0, a, BoundaryCondition::Dirichlet), Error);
}

TEST_CASE("supersolution") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const Barrier b = build_supersolution(sample([](double) { return 1.0; }, g), 0.5);
    CHECK(b.scale == doctest::Approx(1.1 * pi * pi / 8).epsilon(1e-4));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(b.field[i] == doctest::Approx(b.scale * g.x(i) * (pi - g.x(i)) / 2).epsilon(1e-9));
    }
    CHECK(b.verified);

    // For q -> 0 the exponent q/(1-q) vanishes.
    const ScalarField big = sample([](double) { return 10.0; }, g);
    CHECK(build_supersolution(big, 1e-9).scale == doctest::Approx(1.1).epsilon(1e-6));

    const ScalarField a = eval_weight(ExampleCos{0.5}, g);
    const Barrier e = build_supersolution(a, 0.5);
    CHECK(residual(0.5, a, e.field, BoundaryCondition::Dirichlet).min() >= -1e-12);
}

TEST_CASE("ball subsolution") {
    const Grid g(LineGeometry{0.0, pi}, 511);
    const ScalarField one = sample([](double) { return 1.0; }, g);
    const Barrier b = build_subsolution_ball(one, 0.5, Ball{pi / 2, pi / 2});
    CHECK(b.eigenvalue == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(b.scale == doctest::Approx(0.9).epsilon(1e-3));
    CHECK(b.field[256] == doctest::Approx(b.scale).epsilon(1e-4));
    CHECK(b.verified);

    const Barrier b2 = build_subsolution_ball(scaled(one, 2.0), 0.5, Ball{pi / 2, pi / 2});
    CHECK(b2.scale > b.scale);

    const ScalarField a = eval_weight(ExampleCos{0.5}, g);
    CHECK_THROWS_AS(build_subsolution_ball(a, 0.5, Ball{0.3, 0.2}), Error);
}

TEST_CASE("monotone iteration") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const auto ex = oracles::exact_example(0.5, g);
    const Barrier super = build_supersolution(ex.a, 0.5);
    const Barrier sub = build_subsolution_ball(ex.a, 0.5, Ball{pi / 2, pi / 6 - 0.1});
    REQUIRE(super.verified);
    REQUIRE(sub.verified);
    const MonotoneResult m = monotone_iterate(0.5, ex.a, BoundaryCondition::Dirichlet, sub.field, super.field);
    CHECK(m.result.converged);
    CHECK(m.monotonicity_violations == 0);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(m.result.u[i] - ex.u[i]));
    CHECK(err <= 1e-4);
}

TEST_CASE("monotone iteration at a fixed point") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double) { return 1.0; }, g);
    const SolveResult gs = ground_state(0.5, a, BoundaryCondition::Dirichlet);
    // The computed solution satisfies the equation to the solver tolerance only.
    MonotoneOptions mo;
    mo.order_slack = 1e-9;
    const MonotoneResult m = monotone_iterate(0.5, a, BoundaryCondition::Dirichlet, gs.u, gs.u, {}, mo);
    CHECK(m.result.iterations <= 1);
    CHECK(m.result.converged);
}

TEST_CASE("monotone iteration needs ordered barriers") {
    const Grid g(LineGeometry{0.0, pi}, 63);
    const ScalarField a = sample([](double) { return 1.0; }, g);
    const ScalarField sub = sample([](double x) { return 0.1 * std::sin(x); }, g);
    try {
        monotone_iterate(0.5, a, BoundaryCondition::Dirichlet, sub, ScalarField(g));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OrderViolation);
    }
}

TEST_CASE("ball nodes") {
    const Grid g(LineGeometry{0.0, 1.0}, 9);
    CHECK(ball_nodes(g, Ball{0.5, 0.15}).size() == 3);
    CHECK(ball_nodes(g, Ball{0.5, 0.25}, true).size() == 5);
    CHECK(ball_nodes(g, Ball{0.5, 0.05}).size() == 1);
}
