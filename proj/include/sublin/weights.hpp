#pragma once

// Weight families a(x) and numerical checks of the structural hypotheses on a.

#include <optional>
#include <variant>
#include <vector>

#include "sublin/domain.hpp"

namespace sublin {

/// Pointwise profile used to build weights: a constant, a piecewise polynomial
/// in the coordinate (zero outside every piece), or a cosine series.
struct PolyPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> coeffs;  // value = sum_k coeffs[k] x^k
};

struct TrigTerm {
    double amplitude = 0.0;
    double frequency = 1.0;
    double phase = 0.0;
};

struct Profile {
    enum class Kind { Constant, Piecewise, Trig };
    Kind kind = Kind::Constant;
    double offset = 0.0;            // Constant value, or the Trig offset
    std::vector<PolyPiece> pieces;  // Piecewise
    std::vector<TrigTerm> terms;    // Trig: offset + sum A cos(f x + p)

    double operator()(double x) const;

    static Profile constant(double value);
    static Profile piecewise(std::vector<PolyPiece> pieces);
    static Profile trig(double offset, std::vector<TrigTerm> terms);
};

/// a_q(x) = r^{1-2/r} (1 - r cos^2 x) on [0, pi] with r = 2/(1-q).
struct ExampleCos {
    double q = 0.5;
};

/// Radial weight split at R0: InnerPositive puts a_plus in B_R0 and -a_minus
/// in the annulus; InnerNegative is the reverse layout.
enum class RadialLayout { InnerPositive, InnerNegative };

struct RadialPiecewise {
    Profile a_plus;
    Profile a_minus;
    double r0 = 0.5;
    double r = 1.0;
    RadialLayout layout = RadialLayout::InnerPositive;
};

/// a_delta = b1 - delta * b2 with b1, b2 >= 0 of disjoint support.
struct DeltaFamily {
    Profile b1;
    Profile b2;
    double delta = 0.0;
};

struct Table {
    ScalarField field;
};

using WeightSpec = std::variant<ExampleCos, RadialPiecewise, DeltaFamily, Table>;

ScalarField eval_weight(const WeightSpec& spec, const Grid& grid);

/// Surface area omega_{N-1} of the unit sphere in R^N.
double omega_sphere(int dim);

/// Checks that two nonnegative fields have disjoint discrete supports.
void require_disjoint_supports(const ScalarField& b1, const ScalarField& b2);

struct RegionMetadata {
    std::optional<double> r0;
    std::optional<double> r;
    std::optional<double> rho0;  // tubular band width; default 0.1 * diameter
};

struct ConditionReport {
    struct {
        bool holds = false;
        double value = 0.0;
    } a0;
    struct {
        int component_count = 0;
    } a1;
    // Inner sphere condition: not checkable on nodes, true for the built-in
    // 1D and radial families.
    bool a2_by_construction = true;
    struct {
        bool holds = false;
        double min_interior = 0.0;
        double min_inward_slope = 0.0;
    } a3;
    struct {
        bool holds = false;
    } a3prime;
    struct {
        bool holds = false;
        std::optional<double> eta;  // nullopt when |a| vanishes on the band
        double rho0 = 0.0;
        int points = 0;
    } a4;
    struct Inferno {
        bool holds = false;
        double lhs = 0.0;
        double rhs = 0.0;
        bool layout_ok = false;
    };
    std::optional<Inferno> inferno;
    struct {
        double threshold = 0.0;
    } cq;
    struct Sipi {
        bool holds = false;
        double lhs = 0.0;
        double rhs = 0.0;
        bool layout_ok = false;
    };
    std::optional<Sipi> sipi;
};

inline constexpr double kA4Margin = 0.01;
inline constexpr double kA4Floor = 1e-14;

/// Evaluates the structural hypotheses a0..a4, the ball/annulus conditions and the integral
/// threshold -∫a/∫|a|. The ball/annulus conditions need q and R0, R (taken
/// from a RadialPiecewise spec or from `regions`); on Radial grids their
/// absence is an error, on Line grids they are skipped.
ConditionReport check_conditions(const WeightSpec& spec, const Grid& grid, std::optional<double> q,
                                 const RegionMetadata& regions = {});

/// Same checks on an already sampled weight.
ConditionReport check_conditions(const ScalarField& a, std::optional<double> q, const RegionMetadata& regions);

}  // namespace sublin
