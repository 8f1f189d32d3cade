#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sublin/continuation.hpp"
#include "sublin/linalg.hpp"

using namespace sublin;
using std::numbers::pi;

namespace {

double t_star_at(int n) {
    const Grid g(LineGeometry{0.0, pi}, n);
    const ScalarField a = sample([](double x) { return std::cos(x) - 0.3; }, g);
    return t_star(a, principal_eigenpair(a, BoundaryCondition::Neumann).phi);
}

}  // namespace

TEST_CASE("t star of constant fields") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField a = sample([](double x) { return 1.0 + std::sin(x); }, g);
    CHECK(t_star(a, sample([](double) { return 1.0 / std::sqrt(pi); }, g)) == doctest::Approx(std::sqrt(pi)));
    CHECK(t_star(a, sample([](double) { return 1.0; }, g)) == doctest::Approx(1.0));
}

TEST_CASE("t star converges under refinement") {
    // Second-order quadrature: Richardson extrapolation from two grids
    // against a much finer one.
    const double coarse = t_star_at(511), mid = t_star_at(1023), fine = t_star_at(8191);
    CHECK(std::abs((4 * mid - coarse) / 3 - fine) <= 1e-6);
    CHECK(std::abs(fine - mid) <= 1e-5);
}

TEST_CASE("regimes") {
    CHECK(regime_classify(2.0) == Regime::ToZero);
    CHECK(regime_classify(1.0) == Regime::ToTStarPhi);
    CHECK(regime_classify(0.5) == Regime::ToInfinity);
    CHECK(regime_name(Regime::ToZero) == "to_zero");
}

TEST_CASE("normalized weight has unit eigenvalue") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double x) { return std::cos(x) - 0.3; }, g);
    CHECK(principal_eigenpair(normalize_weight(a, BoundaryCondition::Neumann), BoundaryCondition::Neumann).mu ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("branches as q -> 1") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField n = normalize_weight(sample([](double x) { return std::cos(x) - 0.3; }, g), BoundaryCondition::Neumann);

    const BranchData unit = trace_branch(n, BoundaryCondition::Neumann);
    REQUIRE(unit.points.size() == kDefaultBranchQ.size());
    REQUIRE(unit.points.back().scaled_distance);
    CHECK(*unit.points.back().scaled_distance <= 5e-2);
    CHECK(unit.healthy);

    const BranchData big = trace_branch(scaled(n, 0.5), BoundaryCondition::Neumann);
    CHECK(big.regime == Regime::ToZero);
    for (std::size_t k = 1; k < big.points.size(); ++k) CHECK(big.points[k].norm_inf < big.points[k - 1].norm_inf);

    const BranchData small = trace_branch(scaled(n, 2.0), BoundaryCondition::Neumann);
    CHECK(small.regime == Regime::ToInfinity);
    for (std::size_t k = 1; k < small.points.size(); ++k) CHECK(small.points[k].min_u > small.points[k - 1].min_u);
}
