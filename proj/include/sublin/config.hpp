#pragma once

// JSON run configuration shared by every CLI subcommand.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sublin/domain.hpp"
#include "sublin/nonlinear.hpp"
#include "sublin/weights.hpp"

namespace sublin {

struct OutputConfig {
    std::filesystem::path dir = "out";
    bool csv = true;
    bool json = true;
};

struct DeadcoreConfig {
    double rho = 0.1;
    std::vector<double> deltas;
};

struct RunConfig {
    Geometry geometry = LineGeometry{};
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int n_interior = 255;
    WeightSpec weight = ExampleCos{};
    std::optional<double> q;
    std::vector<double> q_grid;
    SolverOptions solver;
    OutputConfig output;
    RegionMetadata regions;
    bool branch = false;          // sweep traces the q -> 1 branch instead
    double resolution = 1e-3;     // bisection width for q_hat
    DeadcoreConfig deadcore;

    Grid grid() const { return build_grid(geometry, n_interior); }
};

/// Numbers may be written as JSON numbers or as strings such as "pi",
/// "2pi", "pi/2" or "0.5*pi".
double parse_number(const nlohmann::json& value, const std::string& where);

Profile parse_profile(const nlohmann::json& value, const std::string& where);

/// Throws Error(Config) on any schema problem.
RunConfig parse_config(const nlohmann::json& doc);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace sublin
