#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"
#include "sublin/nonlinear.hpp"
#include "sublin/oracles.hpp"
#include "sublin/weights.hpp"

using namespace sublin;
using std::numbers::pi;

namespace {

// Smallest eigenvalue of M^{-1/2} (K - M diag(q a u^{q-1})) M^{-1/2}, by a
// dense symmetric solver.
double dense_gamma1(double q, const ScalarField& u, const ScalarField& a, BoundaryCondition bc, double theta) {
    const DiscreteLaplacian L(u.grid(), bc);
    const auto uu = L.restrict(u), au = L.restrict(a);
    const auto m = L.mass();
    const auto& K = L.stiffness();
    const long n = static_cast<long>(uu.size());
    const double floor = theta * u.max_abs();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i) {
        A(i, i) = K.diag[i] / m[i] - q * au[i] * std::pow(std::max(uu[i], floor), q - 1.0);
        if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = K.off[i] / std::sqrt(m[i] * m[i + 1]);
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("thomas solve against a dense solve") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    SymTridiagonal T;
    const int n = 40;
    for (int i = 0; i < n; ++i) T.diag.push_back(4.0 + d(rng));
    for (int i = 0; i + 1 < n; ++i) T.off.push_back(d(rng));
    std::vector<double> b(n);
    for (auto& v : b) v = d(rng);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = T.diag[i];
        if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = T.off[i];
        rhs(i) = b[i];
    }
    const Eigen::VectorXd ref = A.lu().solve(rhs);
    const auto x = solve_tridiagonal(T, b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-12));
}

TEST_CASE("poisson with constant source") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField u = solve_poisson(sample([](double) { return 1.0; }, g));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(u[i] - g.x(i) * (pi - g.x(i)) / 2.0) <= 1e-12);
    CHECK(u.max() == doctest::Approx(pi * pi / 8).epsilon(1e-4));
    CHECK(solve_poisson(ScalarField(g)).max_abs() == 0.0);
}

TEST_CASE("poisson for the example weight") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const ScalarField s = solve_poisson(eval_weight(ExampleCos{0.5}, g));
    const ScalarField ref = oracles::exact_poisson_reference(g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(s[i] - ref[i]));
    CHECK(err <= 1e-4);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(s[i] < 0.0);
}

TEST_CASE("poisson rejects neumann") {
    const Grid g(LineGeometry{0.0, 1.0}, 15);
    CHECK_THROWS_AS(solve_poisson(ScalarField(g), BoundaryCondition::Neumann), Error);
}

TEST_CASE("operator norm of S") {
    CHECK(std::abs(operator_norm_S(Grid(LineGeometry{0.0, pi}, 255)) - pi * pi / 8) <= 1e-12);
    CHECK(std::abs(operator_norm_S(Grid(LineGeometry{0.0, 1.0}, 255)) - 0.125) <= 1e-12);
    CHECK(std::abs(operator_norm_S(Grid(RadialGeometry{1.0, 3}, 2047)) - 1.0 / 6.0) <= 1e-6);
}

TEST_CASE("principal eigenpairs") {
    const Grid g(LineGeometry{0.0, pi}, 2047);
    const EigenPair e = principal_eigenpair(sample([](double) { return 1.0; }, g), BoundaryCondition::Dirichlet);
    CHECK(std::abs(e.mu - 1.0) <= 1e-5);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(e.phi[i] - std::sqrt(2 / pi) * std::sin(g.x(i))) <= 1e-5);

    const Grid u(LineGeometry{0.0, 1.0}, 1023);
    const EigenPair e1 = principal_eigenpair(sample([](double) { return 1.0; }, u), BoundaryCondition::Dirichlet);
    CHECK(e1.mu == doctest::Approx(pi * pi).epsilon(1e-3));

    const Grid n(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double x) { return std::cos(x) - 0.3; }, n);
    const EigenPair en = principal_eigenpair(a, BoundaryCondition::Neumann);
    CHECK(en.mu > 0.0);
    CHECK(en.residual_inf <= 1e-6);
    CHECK(en.inertia_monotone);
    CHECK(en.phi.min() > 0.0);
}

TEST_CASE("eigenvalue scales inversely with the weight") {
    const Grid n(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double x) { return std::cos(x) - 0.3; }, n);
    const double mu = principal_eigenpair(a, BoundaryCondition::Neumann).mu;
    const double mu3 = principal_eigenpair(scaled(a, 3.0), BoundaryCondition::Neumann).mu;
    CHECK(mu3 == doctest::Approx(mu / 3.0).epsilon(1e-8));
}

TEST_CASE("no positive eigenvalue") {
    const Grid g(LineGeometry{0.0, pi}, 63);
    CHECK_THROWS_AS(principal_eigenpair(sample([](double) { return -1.0; }, g), BoundaryCondition::Dirichlet), Error);
}

TEST_CASE("linearized eigenvalue against a dense solver") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const auto ex = oracles::exact_example(0.5, g);
    const LinearizedEigen lin = linearized_eigenvalue(0.5, ex.u, ex.a, BoundaryCondition::Dirichlet);
    const double ref = dense_gamma1(0.5, ex.u, ex.a, BoundaryCondition::Dirichlet, kPotentialClamp);
    CHECK(std::isfinite(lin.gamma1));
    CHECK(lin.gamma1 == doctest::Approx(ref).epsilon(1e-8));

    const ScalarField a = sample([](double x) { return 1.5 + std::cos(2 * x); }, g);
    const SolveResult r = ground_state(0.3, a, BoundaryCondition::Dirichlet);
    const LinearizedEigen l2 = linearized_eigenvalue(0.3, r.u, a, BoundaryCondition::Dirichlet);
    CHECK(l2.gamma1 == doctest::Approx(dense_gamma1(0.3, r.u, a, BoundaryCondition::Dirichlet, kPotentialClamp)).epsilon(1e-8));
    CHECK(l2.gamma1 > 0.0);
}

TEST_CASE("linearization at q = 1 along the eigenfunction") {
    const Grid g(LineGeometry{0.0, pi}, 255);
    const ScalarField a = sample([](double x) { return 1.0 + 0.5 * std::sin(x); }, g);
    const EigenPair e = principal_eigenpair(a, BoundaryCondition::Dirichlet);
    const double gamma = linearized_eigenvalue(1.0, e.phi, scaled(a, e.mu), BoundaryCondition::Dirichlet).gamma1;
    CHECK(std::abs(gamma) <= 1e-6);
}

TEST_CASE("nonpositive weight gives a positive linearization") {
    const Grid g(LineGeometry{0.0, pi}, 127);
    const ScalarField a = sample([](double x) { return -1.0 - std::cos(x); }, g);
    const ScalarField u = sample([](double x) { return 0.1 + std::sin(x); }, g);
    CHECK(linearized_eigenvalue(0.5, u, a, BoundaryCondition::Dirichlet).gamma1 > 0.0);
    CHECK_THROWS_AS(linearized_eigenvalue(0.5, ScalarField(g), a, BoundaryCondition::Dirichlet), Error);
}
