#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sublin/errors.hpp"
#include "sublin/weights.hpp"

using namespace sublin;
using std::numbers::pi;

TEST_CASE("omega_sphere") {
    CHECK(omega_sphere(1) == doctest::Approx(2.0));
    CHECK(omega_sphere(2) == doctest::Approx(2.0 * pi));
    CHECK(omega_sphere(3) == doctest::Approx(4.0 * pi));
}

TEST_CASE("delta family at delta = 0 is b1") {
    const Grid g(LineGeometry{0.0, 3.0}, 63);
    const Profile b1 = Profile::piecewise({PolyPiece{0.0, 1.0, {0.0, 1.0}}});
    const Profile b2 = Profile::piecewise({PolyPiece{1.5, 2.5, {1.0}}});
    const ScalarField a = eval_weight(DeltaFamily{b1, b2, 0.0}, g);
    const ScalarField ref = sample(b1, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] == ref[i]);
    const ScalarField a5 = eval_weight(DeltaFamily{b1, b2, 5.0}, g);
    CHECK(a5.min() == doctest::Approx(-5.0));
}

TEST_CASE("overlapping delta supports are rejected") {
    const Grid g(LineGeometry{0.0, 3.0}, 63);
    const DeltaFamily bad{Profile::constant(1.0), Profile::piecewise({PolyPiece{1.0, 2.0, {1.0}}}), 1.0};
    CHECK_THROWS_AS(eval_weight(bad, g), Error);
}

TEST_CASE("integral threshold") {
    // a = 2 on [0,1), -3 on [1,2]: threshold (3 - 2) / 5.
    const Grid g(LineGeometry{0.0, 2.0}, 1999);
    const ScalarField a = sample([](double x) { return x < 1.0 ? 2.0 : -3.0; }, g);
    const auto rep = check_conditions(a, std::nullopt, {});
    CHECK(rep.cq.threshold == doctest::Approx(0.2).epsilon(1e-2));
}

TEST_CASE("example weight has negative integral") {
    const Grid g(LineGeometry{0.0, pi}, 1023);
    const auto rep = check_conditions(ExampleCos{0.5}, g, 0.5);
    CHECK(rep.a0.holds);
    CHECK(rep.a0.value == doctest::Approx(-2.0 * pi).epsilon(1e-5));
    CHECK(rep.a1.component_count == 1);
    CHECK(!rep.inferno);
}

TEST_CASE("inferno factor at q = 1/3") {
    const Grid g(RadialGeometry{1.0, 3}, 255);
    const RadialPiecewise spec{Profile::constant(1.0), Profile::constant(1.0), 0.5, 1.0, RadialLayout::InnerPositive};
    const auto third = check_conditions(spec, g, 1.0 / 3.0);
    const auto tiny = check_conditions(spec, g, 1e-9);
    REQUIRE(third.inferno);
    REQUIRE(tiny.inferno);
    CHECK(third.inferno->lhs / tiny.inferno->lhs == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(third.inferno->rhs == doctest::Approx(tiny.inferno->rhs));
}

TEST_CASE("radial conditions need the split radius") {
    const Grid g(RadialGeometry{1.0, 3}, 63);
    const ScalarField a = sample([](double r) { return r < 0.5 ? 1.0 : -1.0; }, g);
    try {
        check_conditions(Table{a}, g, 0.5);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingRegion);
    }
    RegionMetadata m;
    m.r0 = 0.5;
    m.r = 1.0;
    CHECK(check_conditions(Table{a}, g, 0.5, m).inferno);
}

TEST_CASE("layouts") {
    const Grid g(RadialGeometry{1.0, 2}, 99);
    const auto inner = eval_weight(
        RadialPiecewise{Profile::constant(2.0), Profile::constant(3.0), 0.5, 1.0, RadialLayout::InnerPositive}, g);
    const auto outer = eval_weight(
        RadialPiecewise{Profile::constant(2.0), Profile::constant(3.0), 0.5, 1.0, RadialLayout::InnerNegative}, g);
    CHECK(inner[0] == 2.0);
    CHECK(inner[g.size() - 1] == -3.0);
    CHECK(outer[0] == -3.0);
    CHECK(outer[g.size() - 1] == 2.0);
}

TEST_CASE("profiles") {
    CHECK(Profile::constant(1.5)(7.0) == 1.5);
    const Profile p = Profile::piecewise({PolyPiece{0.0, 1.0, {1.0, 2.0, 3.0}}});
    CHECK(p(0.5) == doctest::Approx(1.0 + 1.0 + 0.75));
    CHECK(p(2.0) == 0.0);
    const Profile t = Profile::trig(0.5, {TrigTerm{2.0, 3.0, 0.25}});
    CHECK(t(0.1) == doctest::Approx(0.5 + 2.0 * std::cos(0.3 + 0.25)));
}
