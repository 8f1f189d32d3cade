#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sublin/analysis.hpp"
#include "sublin/errors.hpp"
#include "sublin/oracles.hpp"
#include "sublin/weights.hpp"

using namespace sublin;
using std::numbers::pi;

TEST_CASE("classification") {
    const Grid g(LineGeometry{0.0, pi}, 511);
    const auto ex = oracles::exact_example(0.5, g);
    CHECK(classify(ex.u, BoundaryCondition::Dirichlet).kind == SolutionKind::PositiveNotStrong);
    CHECK(classify(sample([](double x) { return std::sin(x); }, g), BoundaryCondition::Dirichlet).kind ==
          SolutionKind::StronglyPositive);
    CHECK(classify(ScalarField(g), BoundaryCondition::Dirichlet).kind == SolutionKind::Trivial);

    // The same profile extended by zero to [-1, pi + 1].
    const Grid w(LineGeometry{-1.0, pi + 1.0}, 1023);
    const ScalarField ext = sample([](double x) { return x <= 0.0 || x >= pi ? 0.0 : std::pow(std::sin(x), 4) / 4; }, w);
    const Classification c = classify(ext, BoundaryCondition::Dirichlet);
    CHECK(c.kind == SolutionKind::DeadCore);
    CHECK(c.regions.size() == 2);
}

TEST_CASE("neumann classification") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    CHECK(classify(sample([](double x) { return 2 + std::cos(x); }, g), BoundaryCondition::Neumann).kind ==
          SolutionKind::StronglyPositive);
    CHECK(classify(sample([](double x) { return 1 + std::cos(x); }, g), BoundaryCondition::Neumann).kind !=
          SolutionKind::StronglyPositive);
}

TEST_CASE("v transform") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField v = v_transform(sample([](double) { return 1.0; }, g), 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(v[i] == doctest::Approx(2.0));
    CHECK(v_transform(ScalarField(g), 0.5).max_abs() == 0.0);
    const ScalarField ve = v_transform(oracles::exact_example(0.5, g).u, 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(ve[i] == doctest::Approx(std::pow(std::sin(g.x(i)), 2)));
}

TEST_CASE("uniqueness") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double x) { return 1.0 + 0.5 * std::cos(2 * x); }, g);
    SolverOptions o1, o2;
    o2.seed = 4242;
    const SolveResult r1 = ground_state(0.5, a, BoundaryCondition::Dirichlet, o1);
    const SolveResult r2 = ground_state(0.5, a, BoundaryCondition::Dirichlet, o2);
    const UniquenessReport same = uniqueness_check(r1.u, r1.u, 0.5, BoundaryCondition::Dirichlet);
    CHECK(same.consistent);
    CHECK(same.max_gap == 0.0);
    CHECK(uniqueness_check(r1.u, r2.u, 0.5, BoundaryCondition::Dirichlet).consistent);
    const UniquenessReport twice = uniqueness_check(r1.u, scaled(r1.u, 2.0), 0.5, BoundaryCondition::Dirichlet);
    CHECK(!twice.consistent);
    CHECK(twice.max_gap == doctest::Approx(r1.u.max_abs()));
}

TEST_CASE("apriori bound") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double) { return 2.0; }, g);
    CHECK(apriori_bound(a, 0.5) == doctest::Approx(std::pow(pi * pi / 8 * 2.0, 2.0)).epsilon(1e-6));
    const SolveResult r = ground_state(0.5, a, BoundaryCondition::Dirichlet);
    CHECK(r.u.max_abs() <= apriori_bound(a, 0.5));
}

TEST_CASE("positivity sweep") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    std::vector<double> qs;
    for (int i = 1; i <= 19; ++i) qs.push_back(0.05 * i);
    const SweepReport ex = positivity_sweep(eval_weight(ExampleCos{0.5}, g), BoundaryCondition::Dirichlet, qs, {}, 4);
    CHECK(ex.interval_ok);
    REQUIRE(ex.q_hat);
    CHECK(*ex.q_hat >= 0.5);

    const SweepReport def = positivity_sweep(sample([](double) { return 1.0; }, g), BoundaryCondition::Dirichlet, qs, {}, 4);
    REQUIRE(def.q_hat);
    CHECK(*def.q_hat == doctest::Approx(0.05));
    for (const auto& p : def.points) CHECK(p.kind == SolutionKind::StronglyPositive);

    const SweepReport neg = positivity_sweep(sample([](double) { return -1.0; }, g), BoundaryCondition::Dirichlet, qs, {}, 4);
    CHECK(!neg.q_hat);
    for (const auto& p : neg.points) CHECK(p.kind == SolutionKind::Trivial);
}

TEST_CASE("sweep does not depend on jobs") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField a = eval_weight(ExampleCos{0.5}, g);
    const std::vector<double> qs{0.2, 0.4, 0.6, 0.8};
    const SweepReport r1 = positivity_sweep(a, BoundaryCondition::Dirichlet, qs, {}, 1);
    const SweepReport r3 = positivity_sweep(a, BoundaryCondition::Dirichlet, qs, {}, 3);
    REQUIRE(r1.points.size() == r3.points.size());
    for (std::size_t k = 0; k < r1.points.size(); ++k) {
        CHECK(r1.points[k].energy == r3.points[k].energy);
        CHECK(r1.points[k].norm_inf == r3.points[k].norm_inf);
    }
    CHECK(r1.q_hat == r3.q_hat);
}

TEST_CASE("dead core constants") {
    CHECK(c_nq(1, 0.5) == doctest::Approx(1.0 / 12));
    CHECK(c_nq(3, 0.999) < 1e-6);
    const Grid g(LineGeometry{0.0, 4.0}, 255);
    const ScalarField a = sample([](double x) { return std::abs(x - 2) < 1.0 ? -1.0 : 1.0; }, g);
    const DeadcorePrediction p = deadcore_predict(a, Ball{2.0, 0.9}, 0.5);
    const DeadcorePrediction p9 = deadcore_predict(a, Ball{2.0, 0.9}, 0.95);
    CHECK(p9.threshold_ia > p.threshold_ia);
    const auto w = oracles::barrier_w(2.0, 3.0, 0.5, 1, g);
    CHECK(w[128] == 0.0);
}

TEST_CASE("delta sweep") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField b1 = sample([](double x) { return x < 1.0 ? x : (x > pi - 1.0 ? pi - x : 0.0); }, g);
    const ScalarField b2 = sample([](double x) { return x > 1.2 && x < pi - 1.2 ? 1.0 : 0.0; }, g);
    const DeltaSweepReport rep = deadcore_delta_sweep(b1, b2, 0.3, 0.1, {0.0, 1.0, 10.0, 100.0, 1000.0},
                                                      BoundaryCondition::Dirichlet);
    REQUIRE(rep.rows.size() == 5);
    CHECK(!rep.rows[0].vanishes_on_core);
    REQUIRE(rep.delta_first_deadcore);
    CHECK(rep.rows.back().vanishes_on_core);

    CHECK(shrunken_support(b2, 10.0).empty());
    const DeltaSweepReport wide = deadcore_delta_sweep(b1, b2, 0.3, 10.0, {0.0, 5.0}, BoundaryCondition::Dirichlet);
    CHECK(wide.core.empty());
    REQUIRE(wide.delta_first_deadcore);
    CHECK(*wide.delta_first_deadcore == 0.0);
}
