#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace sublin {

/// Relative thresholds used to classify solutions. All are relative to
/// ||u||_inf except `trivial`, which is absolute in the scale of a.
struct ClassifyThresholds {
    double trivial = 1e-10;
    double dead_core = 1e-7;
    double positive = 1e-8;
    double derivative = 1e-6;
    double uniqueness = 1e-6;
    // Values below this fraction of ||u||_inf are treated as numerical zeros
    // when deciding whether a small run is a genuine dead core.
    double zero = 1e-30;
};

enum class SolutionKind { Trivial, DeadCore, PositiveNotStrong, StronglyPositive };

std::string_view solution_kind_name(SolutionKind kind) noexcept;

struct Classification {
    SolutionKind kind = SolutionKind::Trivial;
    /// Inclusive node-index intervals of the dead core.
    std::vector<std::pair<std::size_t, std::size_t>> regions;
    double min_interior = 0.0;
    /// Inward one-sided slopes at each Dirichlet boundary point.
    std::vector<double> boundary_derivatives;
};

}  // namespace sublin
