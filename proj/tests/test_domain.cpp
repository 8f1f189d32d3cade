#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sublin/domain.hpp"
#include "sublin/errors.hpp"
#include "sublin/oracles.hpp"
#include "sublin/weights.hpp"

using namespace sublin;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Config;
}

std::size_t nearest(const Grid& g, double x) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i) - x) < std::abs(g.x(best) - x)) best = i;
    }
    return best;
}

}  // namespace

TEST_CASE("grid spacing") {
    CHECK(build_grid(LineGeometry{0.0, pi}, 3).h() == doctest::Approx(pi / 4));
    const Grid r = build_grid(RadialGeometry{1.0, 3}, 9);
    CHECK(r.h() == doctest::Approx(0.1));
    CHECK(r.size() == 11);
    CHECK(r.x(0) == 0.0);
    CHECK(r.is_radial());
}

TEST_CASE("grid errors") {
    CHECK(kind_of([] { build_grid(LineGeometry{1.0, 1.0}, 7); }) == ErrorKind::DegenerateInterval);
    CHECK(kind_of([] { build_grid(LineGeometry{0.0, 1.0}, 0); }) == ErrorKind::TooFewNodes);
    CHECK(kind_of([] { build_grid(RadialGeometry{1.0, 0}, 7); }) == ErrorKind::InvalidDimension);
}

TEST_CASE("sample") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField s = sample([](double x) { return std::sin(x); }, g);
    CHECK(s[nearest(g, pi / 2)] == doctest::Approx(1.0));
    const ScalarField a = eval_weight(ExampleCos{0.5}, g);
    CHECK(a[nearest(g, pi / 2)] == doctest::Approx(2.0));
    CHECK(a[0] == doctest::Approx(-6.0));
}

TEST_CASE("integrate") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    CHECK(integrate(sample([](double x) { return std::sin(x); }, g)) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(integrate(ScalarField(g)) == 0.0);
    const Grid b(RadialGeometry{1.0, 3}, 2047);
    CHECK(std::abs(integrate(sample([](double) { return 1.0; }, b)) - 4.0 * pi / 3.0) <= 1e-4);
    const Grid d(RadialGeometry{1.0, 2}, 1023);
    CHECK(std::abs(integrate(sample([](double) { return 1.0; }, d)) - pi) <= 1e-4);
}

TEST_CASE("laplacian on quadratics and constants") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField u = sample([](double x) { return x * (pi - x) / 2.0; }, g);
    const ScalarField lap = apply_laplacian(u, BoundaryCondition::Dirichlet);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(-lap[i] == doctest::Approx(1.0).epsilon(1e-10));

    const ScalarField c = sample([](double) { return 3.5; }, g);
    const ScalarField lc = apply_laplacian(c, BoundaryCondition::Neumann);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(lc[i] == 0.0);
}

TEST_CASE("radial laplacian of r^2") {
    // Δ r^2 = 2N in every dimension, including the centre node.
    for (int dim : {1, 2, 3, 5}) {
        const Grid g(RadialGeometry{1.0, dim}, 63);
        const ScalarField u = sample([](double r) { return r * r; }, g);
        const ScalarField lap = apply_laplacian(u, BoundaryCondition::Neumann);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(lap[i] == doctest::Approx(2.0 * dim).epsilon(1e-9));
    }
}

TEST_CASE("laplacian of the closed-form example") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const auto ex = oracles::exact_example(0.5, g);
    const ScalarField lap = apply_laplacian(ex.u, BoundaryCondition::Dirichlet);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) err = std::max(err, std::abs(-lap[i] - ex.a[i] * std::sqrt(ex.u[i])));
    CHECK(err < 1e-5);
}

TEST_CASE("flux form is symmetric positive semidefinite") {
    for (auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
        const DiscreteLaplacian L(Grid(RadialGeometry{2.0, 3}, 31), bc);
        const auto& K = L.stiffness();
        for (std::size_t i = 0; i < K.size(); ++i) {
            double row = K.diag[i];
            if (i > 0) row += K.off[i - 1];
            if (i + 1 < K.size()) row += K.off[i];
            CHECK(row >= -1e-12);
        }
        for (double m : L.mass()) CHECK(m > 0.0);
    }
}

TEST_CASE("field helpers") {
    const Grid g(LineGeometry{0.0, 1.0}, 7);
    const ScalarField f = sample([](double x) { return x - 0.5; }, g);
    const ScalarField p = positive_part(f), n = negative_part(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(p[i] >= 0.0);
        CHECK(n[i] >= 0.0);
        CHECK(p[i] - n[i] == doctest::Approx(f[i]));
    }
    CHECK(scaled(f, 2.0).max() == doctest::Approx(1.0));
    CHECK(kind_of([&] { require_same_grid(f, ScalarField(Grid(LineGeometry{0.0, 1.0}, 9)), "t"); }) ==
          ErrorKind::GridMismatch);
}
