#pragma once

// Command-line driver: JSON config in, CSV and JSON files out.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sublin/config.hpp"

namespace sublin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNonconverged = 2;
inline constexpr int kExitVerify = 3;

struct CommandOptions {
    std::optional<std::filesystem::path> out;  // wins over OUTPUT_DIR and the config
    int jobs = 1;
};

/// Output directory: --out, then OUTPUT_DIR, then output.dir of the config.
std::filesystem::path resolve_output_dir(const RunConfig& config, const CommandOptions& options);

int cmd_solve(const RunConfig& config, const CommandOptions& options);
int cmd_sweep(const RunConfig& config, const CommandOptions& options);
int cmd_eigen(const RunConfig& config, const CommandOptions& options);
int cmd_poisson(const RunConfig& config, const CommandOptions& options);
int cmd_conditions(const RunConfig& config, const CommandOptions& options);
int cmd_deadcore(const RunConfig& config, const CommandOptions& options);

struct VerifyOptions {
    bool list = false;
    std::optional<std::string> only;     // run a single check
    std::optional<std::string> corrupt;  // negative control: this check gets an impossible threshold
};

int cmd_verify(const VerifyOptions& options, std::ostream& out);

int run_cli(int argc, char** argv);

}  // namespace sublin
