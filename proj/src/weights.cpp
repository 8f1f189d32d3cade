#include "sublin/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sublin/analysis.hpp"
#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"

namespace sublin {

namespace detail {
double unit_sphere_area(int dim);
}

double Profile::operator()(double x) const {
    switch (kind) {
        case Kind::Constant:
            return offset;
        case Kind::Piecewise:
            for (const auto& piece : pieces) {
                if (x >= piece.lo && x <= piece.hi) {
                    double v = 0.0;
                    for (std::size_t k = piece.coeffs.size(); k-- > 0;) v = v * x + piece.coeffs[k];
                    return v;
                }
            }
            return 0.0;
        case Kind::Trig: {
            double v = offset;
            for (const auto& t : terms) v += t.amplitude * std::cos(t.frequency * x + t.phase);
            return v;
        }
    }
    return 0.0;
}

Profile Profile::constant(double value) {
    Profile p;
    p.kind = Kind::Constant;
    p.offset = value;
    return p;
}

Profile Profile::piecewise(std::vector<PolyPiece> pieces) {
    Profile p;
    p.kind = Kind::Piecewise;
    p.pieces = std::move(pieces);
    return p;
}

Profile Profile::trig(double offset, std::vector<TrigTerm> terms) {
    Profile p;
    p.kind = Kind::Trig;
    p.offset = offset;
    p.terms = std::move(terms);
    return p;
}

double omega_sphere(int dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidDimension, "omega_sphere needs N >= 1");
    return detail::unit_sphere_area(dim);
}

void require_disjoint_supports(const ScalarField& b1, const ScalarField& b2) {
    require_same_grid(b1, b2, "b1 and b2 live on different grids");
    for (std::size_t i = 0; i < b1.size(); ++i) {
        if (b1[i] < 0.0 || b2[i] < 0.0) throw Error(ErrorKind::B1B2Violation, "b1 and b2 must be nonnegative");
        if (b1[i] > 0.0 && b2[i] > 0.0) {
            throw Error(ErrorKind::B1B2Violation, "b1 and b2 are both positive at node " + std::to_string(i));
        }
    }
}

namespace {

ScalarField eval_example_cos(const ExampleCos& spec, const Grid& grid) {
    const auto* line = std::get_if<LineGeometry>(&grid.geometry());
    if (line == nullptr || line->lo != 0.0 || std::abs(line->hi - std::numbers::pi) > 1e-12) {
        throw Error(ErrorKind::DomainMismatch, "the cosine example weight lives on [0, pi]");
    }
    if (!(spec.q > 0.0 && spec.q < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");
    const double r = 2.0 / (1.0 - spec.q);
    const double amp = std::pow(r, 1.0 - 2.0 / r);
    return sample([&](double x) { return amp * (1.0 - r * std::cos(x) * std::cos(x)); }, grid);
}

ScalarField eval_radial(const RadialPiecewise& spec, const Grid& grid) {
    if (!(spec.r0 > 0.0 && spec.r0 < spec.r)) throw Error(ErrorKind::InvalidArgument, "need 0 < R0 < R");
    if (!grid.is_radial() || std::abs(grid.hi() - spec.r) > 1e-12 * spec.r) {
        throw Error(ErrorKind::DomainMismatch, "radial weight needs a Radial grid of radius R");
    }
    const bool inner_positive = spec.layout == RadialLayout::InnerPositive;
    return sample(
        [&](double r) {
            const bool inner = r <= spec.r0;
            const bool positive_side = inner == inner_positive;
            const double v = positive_side ? spec.a_plus(r) : spec.a_minus(r);
            if (v < 0.0) throw Error(ErrorKind::InvalidArgument, "a_plus and a_minus profiles must be nonnegative");
            return positive_side ? v : -v;
        },
        grid);
}

ScalarField eval_delta(const DeltaFamily& spec, const Grid& grid) {
    if (!(spec.delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be >= 0");
    const ScalarField b1 = sample(spec.b1, grid);
    const ScalarField b2 = sample(spec.b2, grid);
    require_disjoint_supports(b1, b2);
    ScalarField a = b1;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = b1[i] - spec.delta * b2[i];
    return a;
}

}  // namespace

ScalarField eval_weight(const WeightSpec& spec, const Grid& grid) {
    if (const auto* s = std::get_if<ExampleCos>(&spec)) return eval_example_cos(*s, grid);
    if (const auto* s = std::get_if<RadialPiecewise>(&spec)) return eval_radial(*s, grid);
    if (const auto* s = std::get_if<DeltaFamily>(&spec)) return eval_delta(*s, grid);
    const auto& table = std::get<Table>(spec);
    if (!(table.field.grid() == grid)) throw Error(ErrorKind::DomainMismatch, "table weight sampled on another grid");
    return table.field;
}

namespace {

int positive_components(const ScalarField& a) {
    int count = 0;
    bool inside = false;
    for (double v : a.values()) {
        if (v > 0.0 && !inside) ++count;
        inside = v > 0.0;
    }
    return count;
}

// Least-squares slope of log|a| against log d over the band 0 < d < rho0.
void fit_decay(const ScalarField& a, double rho0, ConditionReport& report) {
    const Grid& g = a.grid();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = g.boundary_distance(i);
        if (!(d > 0.0 && d < rho0) || std::abs(a[i]) <= kA4Floor) continue;
        const double lx = std::log(d);
        const double ly = std::log(std::abs(a[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    report.a4.rho0 = rho0;
    report.a4.points = n;
    const double threshold = 1.0 - 1.0 / g.dim() + kA4Margin;
    if (n == 0) {
        report.a4.eta.reset();
        report.a4.holds = true;
        return;
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2 || denom <= 0.0) {
        // A single sample cannot pin an exponent: |a| bounded away from 0 means eta = 0.
        report.a4.eta = 0.0;
        report.a4.holds = 0.0 > threshold;
        return;
    }
    const double eta = (n * sxy - sx * sy) / denom;
    report.a4.eta = eta;
    report.a4.holds = eta > threshold;
}

}  // namespace

ConditionReport check_conditions(const ScalarField& a, std::optional<double> q, const RegionMetadata& regions) {
    const Grid& g = a.grid();
    ConditionReport report;

    report.a0.value = integrate(a);
    report.a0.holds = report.a0.value < 0.0;
    report.a1.component_count = positive_components(a);

    const ScalarField z = solve_poisson(a);
    DiscreteLaplacian lap(g, BoundaryCondition::Dirichlet);
    const auto zu = lap.restrict(z);
    report.a3.min_interior = *std::min_element(zu.begin(), zu.end());
    report.a3prime.holds = report.a3.min_interior > 0.0;
    const auto slopes = inward_boundary_slopes(z);
    report.a3.min_inward_slope = *std::min_element(slopes.begin(), slopes.end());
    const double slope_floor = ClassifyThresholds{}.derivative * z.max_abs() / g.diameter();
    report.a3.holds = report.a3prime.holds && report.a3.min_inward_slope > slope_floor;

    fit_decay(a, regions.rho0.value_or(0.1 * (g.hi() - g.lo())), report);

    const double abs_integral = integrate(positive_part(a)) + integrate(negative_part(a));
    report.cq.threshold = abs_integral > 0.0 ? -report.a0.value / abs_integral : 0.0;

    const bool have_regions = regions.r0.has_value() && regions.r.has_value();
    if (!have_regions) {
        if (g.is_radial() && q.has_value()) {
            throw Error(ErrorKind::MissingRegion, "ball/annulus conditions need R0 and R");
        }
        return report;
    }
    if (!g.is_radial()) throw Error(ErrorKind::DomainMismatch, "ball/annulus regions need a Radial grid");
    const double r0 = *regions.r0;
    if (!(r0 > 0.0 && r0 < *regions.r) || std::abs(*regions.r - g.hi()) > 1e-12 * g.hi()) {
        throw Error(ErrorKind::InvalidArgument, "regions must satisfy 0 < R0 < R = grid radius");
    }
    if (!q.has_value()) return report;
    const double qq = *q;
    if (!(qq > 0.0 && qq < 1.0)) throw Error(ErrorKind::InvalidArgument, "q must lie in (0, 1)");

    ScalarField inner_plus(g), inner_minus(g), outer_plus(g), outer_minus(g);
    bool inner_nonneg = true, outer_nonpos = true, outer_nonincreasing = true;
    bool outer_nonneg = true;
    double inner_minus_max = 0.0;
    double prev_outer = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = g.x(i);
        const double v = a[i];
        if (r <= r0) {
            inner_plus[i] = std::max(v, 0.0);
            inner_minus[i] = std::max(-v, 0.0);
            inner_minus_max = std::max(inner_minus_max, inner_minus[i]);
            if (r < r0) inner_nonneg = inner_nonneg && v >= 0.0;
        }
        if (r >= r0) {
            outer_plus[i] = std::max(v, 0.0);
            outer_minus[i] = std::max(-v, 0.0);
        }
        // Sign and monotonicity are asked on the open ball and annulus.
        if (r > r0) {
            outer_nonpos = outer_nonpos && v <= 0.0;
            outer_nonneg = outer_nonneg && v >= 0.0;
            outer_nonincreasing = outer_nonincreasing && v <= prev_outer;
            prev_outer = v;
        }
    }
    ConditionReport::Inferno inferno;
    inferno.lhs = (1.0 - qq) / (1.0 + qq) * integrate(outer_minus);
    inferno.rhs = integrate(inner_plus);
    inferno.holds = inferno.lhs <= inferno.rhs;
    inferno.layout_ok = inner_nonneg && outer_nonpos && outer_nonincreasing;
    report.inferno = inferno;

    const int dim = g.dim();
    ConditionReport::Sipi sipi;
    sipi.lhs = (1.0 - qq) / (2.0 * qq + dim * (1.0 - qq)) * omega_sphere(dim) * std::pow(r0, dim) * inner_minus_max;
    sipi.rhs = integrate(outer_plus);
    sipi.holds = sipi.lhs < sipi.rhs;
    sipi.layout_ok = outer_nonneg;
    report.sipi = sipi;
    return report;
}

ConditionReport check_conditions(const WeightSpec& spec, const Grid& grid, std::optional<double> q,
                                 const RegionMetadata& regions) {
    RegionMetadata effective = regions;
    if (const auto* radial = std::get_if<RadialPiecewise>(&spec)) {
        if (!effective.r0) effective.r0 = radial->r0;
        if (!effective.r) effective.r = radial->r;
    }
    return check_conditions(eval_weight(spec, grid), q, effective);
}

}  // namespace sublin
