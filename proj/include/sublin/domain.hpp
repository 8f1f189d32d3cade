#pragma once

// Uniform grids on intervals and radial balls, nodal fields, trapezoid
// quadrature and the discrete Laplacian.
//
// Node layout: a grid with n interior nodes has n + 2 nodes x_0 .. x_{n+1}.
// On a Line the end nodes are the boundary; on a Radial grid x_0 = 0 is the
// symmetry centre (treated as interior) and x_{n+1} = R is the boundary.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace sublin {

struct LineGeometry {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const LineGeometry&) const = default;
};

struct RadialGeometry {
    double radius = 1.0;
    int dim = 1;
    bool operator==(const RadialGeometry&) const = default;
};

using Geometry = std::variant<LineGeometry, RadialGeometry>;

enum class BoundaryCondition { Dirichlet, Neumann };

class Grid {
public:
    Grid(const Geometry& geometry, int n_interior);
    /// Placeholder grid (unit interval, three interior nodes) for default-built results.
    Grid() : Grid(LineGeometry{}, 3) {}

    const Geometry& geometry() const { return geometry_; }
    bool is_radial() const { return std::holds_alternative<RadialGeometry>(geometry_); }
    int n_interior() const { return n_interior_; }
    std::size_t size() const { return static_cast<std::size_t>(n_interior_) + 2; }
    double h() const { return h_; }
    /// Spatial dimension N (1 on a Line).
    int dim() const;
    double lo() const;
    double hi() const;
    /// Coordinate of node i (the radius r_i on a Radial grid).
    double x(std::size_t i) const { return lo() + h_ * static_cast<double>(i); }
    double diameter() const;
    /// Distance from node i to the boundary of the domain.
    double boundary_distance(std::size_t i) const;

    bool operator==(const Grid& other) const {
        return geometry_ == other.geometry_ && n_interior_ == other.n_interior_;
    }

private:
    Geometry geometry_;
    int n_interior_;
    double h_;
};

Grid build_grid(const Geometry& geometry, int n_interior);

class ScalarField {
public:
    ScalarField() : ScalarField(Grid()) {}
    explicit ScalarField(Grid grid);
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    double max_abs() const;
    double min() const;
    double max() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField sample(const std::function<double(double)>& expr, const Grid& grid);

/// Trapezoid rule on a Line; on a Radial grid the trapezoid rule in r against
/// omega_{N-1} r^{N-1}.
double integrate(const ScalarField& field);

/// Pointwise helpers used throughout.
ScalarField positive_part(const ScalarField& f);
ScalarField negative_part(const ScalarField& f);
ScalarField scaled(const ScalarField& f, double c);
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

/// One-sided second-order derivative of u into the domain at each boundary
/// point (both ends of a Line, r = R on a Radial grid). Positive values mean u
/// grows away from the boundary, i.e. a negative outward normal derivative.
std::vector<double> inward_boundary_slopes(const ScalarField& u);

/// Symmetric tridiagonal matrix stored by diagonal and first off-diagonal:
/// off[i] couples rows i and i + 1 (off has size diag.size() - 1).
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
    std::size_t size() const { return diag.size(); }
};

/// The discrete -Δ in flux form: -Δu = M^{-1} K u on the unknown nodes, with K
/// symmetric positive semidefinite and M a positive lumped mass. On a Line the
/// rows reduce to the standard three-point stencil; Neumann ends use the
/// reflected ghost node, and the radial centre uses the symmetry ghost node,
/// giving Δu(0) = 2N (u_1 - u_0) / h^2.
class DiscreteLaplacian {
public:
    DiscreteLaplacian(const Grid& grid, BoundaryCondition bc);

    const Grid& grid() const { return grid_; }
    BoundaryCondition bc() const { return bc_; }
    /// Grid index of the first unknown node.
    std::size_t first() const { return first_; }
    /// Number of unknown nodes.
    std::size_t count() const { return stiffness_.size(); }
    bool is_unknown(std::size_t node) const { return node >= first_ && node < first_ + count(); }
    const SymTridiagonal& stiffness() const { return stiffness_; }
    std::span<const double> mass() const { return mass_; }

    /// y = K u over unknowns (u given on unknowns).
    std::vector<double> apply_stiffness(std::span<const double> u) const;
    /// Restrict a full nodal field to the unknowns.
    std::vector<double> restrict(const ScalarField& f) const;
    /// Scatter unknown values into a full field (Dirichlet boundary = 0).
    ScalarField extend(std::span<const double> u) const;

private:
    Grid grid_;
    BoundaryCondition bc_;
    std::size_t first_;
    SymTridiagonal stiffness_;
    std::vector<double> mass_;
    std::vector<double> boundary_face_;  // coupling to a Dirichlet node, else 0
};

/// Δu with the given boundary condition; Dirichlet boundary nodes are read as 0
/// and reported as 0.
ScalarField apply_laplacian(const ScalarField& u, BoundaryCondition bc);

}  // namespace sublin
