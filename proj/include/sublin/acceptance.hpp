#pragma once

// Built-in acceptance suite, shared by `verify` and the acceptance test binary.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sublin {

struct AcceptanceContext;  // caches solutions reused across checks

struct CheckOutcome {
    bool passed = false;
    std::string detail;
};

struct AcceptanceCheck {
    int id = 0;
    std::string name;
    std::string summary;
    /// `corrupt` swaps the pass threshold for an impossible one.
    std::function<CheckOutcome(AcceptanceContext&, bool corrupt)> run;
};

const std::vector<AcceptanceCheck>& acceptance_checks();

struct CheckReport {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs every check (or only `only`), printing one line per check to `out`
/// as it finishes. Unknown names throw Error(InvalidArgument).
std::vector<CheckReport> run_acceptance(std::ostream& out, const std::optional<std::string>& only = std::nullopt,
                                        const std::optional<std::string>& corrupt = std::nullopt);

}  // namespace sublin
