#include "sublin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sublin/errors.hpp"

namespace sublin {

namespace detail {

double unit_sphere_area(int dim) {
    const double n = dim;
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

}  // namespace detail

namespace {

double spacing(const Geometry& geometry, int n_interior) {
    if (n_interior < 3) {
        throw Error(ErrorKind::TooFewNodes, "n_interior must be >= 3, got " + std::to_string(n_interior));
    }
    const double cells = n_interior + 1.0;
    if (const auto* line = std::get_if<LineGeometry>(&geometry)) {
        if (!std::isfinite(line->lo) || !std::isfinite(line->hi) || !(line->hi > line->lo)) {
            throw Error(ErrorKind::DegenerateInterval, "interval must satisfy lo < hi");
        }
        return (line->hi - line->lo) / cells;
    }
    const auto& radial = std::get<RadialGeometry>(geometry);
    if (radial.dim < 1) {
        throw Error(ErrorKind::InvalidDimension, "radial dimension must be >= 1");
    }
    if (!std::isfinite(radial.radius) || !(radial.radius > 0.0)) {
        throw Error(ErrorKind::DegenerateInterval, "radius must be positive");
    }
    return radial.radius / cells;
}

}  // namespace

Grid::Grid(const Geometry& geometry, int n_interior)
    : geometry_(geometry), n_interior_(n_interior), h_(spacing(geometry, n_interior)) {}

int Grid::dim() const {
    if (const auto* radial = std::get_if<RadialGeometry>(&geometry_)) return radial->dim;
    return 1;
}

double Grid::lo() const {
    if (const auto* line = std::get_if<LineGeometry>(&geometry_)) return line->lo;
    return 0.0;
}

double Grid::hi() const {
    if (const auto* line = std::get_if<LineGeometry>(&geometry_)) return line->hi;
    return std::get<RadialGeometry>(geometry_).radius;
}

double Grid::diameter() const {
    if (is_radial()) return 2.0 * hi();
    return hi() - lo();
}

double Grid::boundary_distance(std::size_t i) const {
    const double xi = x(i);
    if (is_radial()) return std::max(0.0, hi() - xi);
    return std::max(0.0, std::min(xi - lo(), hi() - xi));
}

Grid build_grid(const Geometry& geometry, int n_interior) { return Grid(geometry, n_interior); }

ScalarField::ScalarField(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorKind::GridMismatch, "field has " + std::to_string(values_.size()) +
                                                 " values, grid has " + std::to_string(grid_.size()) + " nodes");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "field value is not finite");
    }
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField sample(const std::function<double(double)>& expr, const Grid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = expr(grid.x(i));
        if (!std::isfinite(values[i])) {
            throw Error(ErrorKind::NonFinite, "expression is not finite at x = " + std::to_string(grid.x(i)));
        }
    }
    return ScalarField(grid, std::move(values));
}

double integrate(const ScalarField& field) {
    const Grid& g = field.grid();
    const std::size_t n = g.size();
    double sum = 0.0;
    if (!g.is_radial()) {
        for (std::size_t i = 0; i < n; ++i) {
            const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            sum += w * field[i];
        }
        return sum * g.h();
    }
    const int dim = g.dim();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        const double r = g.x(i);
        const double jac = dim == 1 ? 1.0 : std::pow(r, dim - 1);
        sum += w * field[i] * jac;
    }
    return sum * g.h() * detail::unit_sphere_area(dim);
}

ScalarField positive_part(const ScalarField& f) {
    ScalarField out = f;
    for (double& v : out.values()) v = std::max(v, 0.0);
    return out;
}

ScalarField negative_part(const ScalarField& f) {
    ScalarField out = f;
    for (double& v : out.values()) v = std::max(-v, 0.0);
    return out;
}

ScalarField scaled(const ScalarField& f, double c) {
    ScalarField out = f;
    for (double& v : out.values()) v *= c;
    return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::GridMismatch, what);
}

std::vector<double> inward_boundary_slopes(const ScalarField& u) {
    const Grid& g = u.grid();
    const std::size_t last = g.size() - 1;
    const double h = g.h();
    std::vector<double> slopes;
    if (!g.is_radial()) slopes.push_back((-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h));
    slopes.push_back((-3.0 * u[last] + 4.0 * u[last - 1] - u[last - 2]) / (2.0 * h));
    return slopes;
}

DiscreteLaplacian::DiscreteLaplacian(const Grid& grid, BoundaryCondition bc)
    : grid_(grid), bc_(bc) {
    const std::size_t nodes = grid.size();
    const bool dirichlet = bc == BoundaryCondition::Dirichlet;
    first_ = (dirichlet && !grid.is_radial()) ? 1 : 0;
    const std::size_t last = dirichlet ? nodes - 2 : nodes - 1;
    const std::size_t count = last - first_ + 1;

    const double h = grid.h();
    const int dim = grid.dim();
    const bool radial = grid.is_radial();
    const double omega = radial ? detail::unit_sphere_area(dim) : 1.0;

    // Face j sits between nodes j and j + 1 at radius (j + 1/2) h.
    auto face = [&](std::size_t j) {
        if (!radial || dim == 1) return omega / h;
        const double r = (static_cast<double>(j) + 0.5) * h;
        return omega * std::pow(r, dim - 1) / h;
    };
    // Control volume of node i: [x_i - h/2, x_i + h/2] clipped to the domain.
    auto volume = [&](std::size_t i) {
        const bool boundary = (i == 0 && !radial) || i + 1 == nodes;
        const bool centre = radial && i == 0;
        if (!radial || dim == 1) {
            return omega * ((boundary || centre) ? 0.5 * h : h);
        }
        const double r = grid.x(i);
        const double inner = centre ? 0.0 : r - 0.5 * h;
        const double outer = (i + 1 == nodes) ? r : r + 0.5 * h;
        return omega * (std::pow(outer, dim) - std::pow(inner, dim)) / dim;
    };

    stiffness_.diag.assign(count, 0.0);
    stiffness_.off.assign(count > 0 ? count - 1 : 0, 0.0);
    mass_.resize(count);
    boundary_face_.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = first_ + k;
        mass_[k] = volume(i);
        double d = 0.0;
        if (i > 0) d += face(i - 1);
        if (i + 1 < nodes) d += face(i);
        stiffness_.diag[k] = d;
        if (k + 1 < count) stiffness_.off[k] = -face(i);
        if (i > 0 && !is_unknown(i - 1)) boundary_face_[k] += face(i - 1);
        if (i + 1 < nodes && !is_unknown(i + 1)) boundary_face_[k] += face(i);
    }
}

std::vector<double> DiscreteLaplacian::apply_stiffness(std::span<const double> u) const {
    const std::size_t n = count();
    std::vector<double> y(n);
    // Flux differences keep the rounding error proportional to |u'| rather
    // than |u| / h^2.
    for (std::size_t k = 0; k < n; ++k) {
        double s = boundary_face_[k] * u[k];
        if (k > 0) s -= stiffness_.off[k - 1] * (u[k] - u[k - 1]);
        if (k + 1 < n) s -= stiffness_.off[k] * (u[k] - u[k + 1]);
        y[k] = s;
    }
    return y;
}

std::vector<double> DiscreteLaplacian::restrict(const ScalarField& f) const {
    if (!(f.grid() == grid_)) throw Error(ErrorKind::GridMismatch, "field grid differs from operator grid");
    auto values = f.values();
    return {values.begin() + static_cast<std::ptrdiff_t>(first_),
            values.begin() + static_cast<std::ptrdiff_t>(first_ + count())};
}

ScalarField DiscreteLaplacian::extend(std::span<const double> u) const {
    std::vector<double> values(grid_.size(), 0.0);
    std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>(first_));
    return ScalarField(grid_, std::move(values));
}

ScalarField apply_laplacian(const ScalarField& u, BoundaryCondition bc) {
    DiscreteLaplacian lap(u.grid(), bc);
    const auto ku = lap.apply_stiffness(lap.restrict(u));
    std::vector<double> lap_u(ku.size());
    for (std::size_t k = 0; k < ku.size(); ++k) lap_u[k] = -ku[k] / lap.mass()[k];
    return lap.extend(lap_u);
}

}  // namespace sublin
