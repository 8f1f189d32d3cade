#include "sublin/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sublin/acceptance.hpp"
#include "sublin/analysis.hpp"
#include "sublin/continuation.hpp"
#include "sublin/errors.hpp"
#include "sublin/linalg.hpp"

namespace sublin {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error(ErrorKind::Config, "cannot write " + path.string());
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::string bc_name(BoundaryCondition bc) { return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann"; }

json conditions_json(const ConditionReport& r) {
    json j;
    j["a0"] = {{"holds", r.a0.holds}, {"value", r.a0.value}};
    j["a1"] = {{"component_count", r.a1.component_count}};
    j["a2_by_construction"] = r.a2_by_construction;
    j["a3"] = {{"holds", r.a3.holds}, {"min_interior", r.a3.min_interior}, {"min_inward_slope", r.a3.min_inward_slope}};
    j["a3prime"] = {{"holds", r.a3prime.holds}};
    j["a4"] = {{"holds", r.a4.holds}, {"eta", opt(r.a4.eta)}, {"rho0", r.a4.rho0}, {"points", r.a4.points}};
    j["cq"] = {{"threshold", r.cq.threshold}};
    j["inferno"] = r.inferno ? json{{"holds", r.inferno->holds},
                                    {"lhs", r.inferno->lhs},
                                    {"rhs", r.inferno->rhs},
                                    {"layout_ok", r.inferno->layout_ok}}
                             : json(nullptr);
    j["sipi"] = r.sipi ? json{{"holds", r.sipi->holds},
                              {"lhs", r.sipi->lhs},
                              {"rhs", r.sipi->rhs},
                              {"layout_ok", r.sipi->layout_ok}}
                       : json(nullptr);
    return j;
}

double require_q(const RunConfig& c, const char* command) {
    if (!c.q) throw Error(ErrorKind::Config, std::string(command) + " needs q");
    return *c.q;
}

fs::path prepare_dir(const RunConfig& c, const CommandOptions& o) {
    const fs::path dir = resolve_output_dir(c, o);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Config, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

}  // namespace

fs::path resolve_output_dir(const RunConfig& config, const CommandOptions& options) {
    if (options.out) return *options.out;
    if (const char* env = std::getenv("OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
    return config.output.dir;
}

int cmd_solve(const RunConfig& c, const CommandOptions& o) {
    const double q = require_q(c, "solve");
    const Grid grid = c.grid();
    const ScalarField a = eval_weight(c.weight, grid);
    const SolveResult r = ground_state(q, a, c.bc, c.solver);
    const ScalarField res = residual(q, a, r.u, c.bc);
    const Classification cls = classify(r.u, c.bc);
    const fs::path dir = prepare_dir(c, o);

    if (c.output.csv) {
        CsvWriter csv(dir / "solution.csv", {"x", "u", "a", "residual"});
        for (std::size_t i = 0; i < grid.size(); ++i) csv.row({fmt(grid.x(i)), fmt(r.u[i]), fmt(a[i]), fmt(res[i])});
    }
    if (c.output.json) {
        json j;
        j["command"] = "solve";
        j["q"] = q;
        j["bc"] = bc_name(c.bc);
        j["n_interior"] = c.n_interior;
        j["converged"] = r.converged;
        j["classification"] = std::string(solution_kind_name(cls.kind));
        json regions = json::array();
        for (const auto& [lo, hi] : cls.regions) regions.push_back({grid.x(lo), grid.x(hi)});
        j["dead_core_regions"] = regions;
        j["energy"] = r.energy;
        j["gamma1"] = r.u.max_abs() > 0.0 ? json(linearized_eigenvalue(q, r.u, a, c.bc).gamma1) : json(nullptr);
        j["residual_inf"] = res.max_abs();
        j["norm_inf"] = r.u.max_abs();
        j["min_interior"] = unknown_min(r.u, c.bc);
        j["starts_used"] = r.starts_used;
        j["iterations"] = r.iterations;
        j["note"] = r.note;
        if (c.bc == BoundaryCondition::Dirichlet) {
            const double bound = apriori_bound(a, q);
            j["apriori_bound"] = {{"bound", bound}, {"holds", r.u.max_abs() <= bound * (1.0 + 1e-6)}};
        } else {
            j["apriori_bound"] = nullptr;
        }
        try {
            j["conditions"] = conditions_json(check_conditions(a, q, c.regions));
        } catch (const Error& e) {
            j["conditions"] = {{"error", e.what()}};
        }
        write_json(dir / "report.json", j);
    }
    return r.converged ? kExitOk : kExitNonconverged;
}

int cmd_sweep(const RunConfig& c, const CommandOptions& o) {
    if (c.q_grid.empty()) throw Error(ErrorKind::Config, "sweep needs a nonempty q_grid");
    const Grid grid = c.grid();
    const ScalarField a = eval_weight(c.weight, grid);
    const fs::path dir = prepare_dir(c, o);
    std::size_t converged = 0, total = 0;
    json j;
    j["command"] = "sweep";
    j["bc"] = bc_name(c.bc);
    j["branch"] = c.branch;

    if (c.branch) {
        const BranchData br = trace_branch(a, c.bc, c.q_grid, c.solver);
        if (c.output.csv) {
            CsvWriter csv(dir / "sweep.csv", {"q", "norm_inf", "min_u", "energy", "gamma1", "classification", "converged",
                                              "scaled_distance"});
            for (const auto& p : br.points) {
                csv.row({fmt(p.q), fmt(p.norm_inf), fmt(p.min_u), fmt(p.energy), fmt(p.gamma1),
                         std::string(solution_kind_name(p.kind)), p.converged ? "1" : "0", fmt(p.scaled_distance)});
            }
        }
        for (const auto& p : br.points) converged += p.converged;
        total = br.points.size();
        j["q_hat"] = nullptr;
        j["interval_ok"] = nullptr;
        j["regime"] = std::string(regime_name(br.regime));
        j["mu"] = br.mu;
        j["t_star"] = br.t_star;
        j["healthy"] = br.healthy;
    } else {
        const SweepReport rep = positivity_sweep(a, c.bc, c.q_grid, c.solver, o.jobs, c.resolution);
        if (c.output.csv) {
            CsvWriter csv(dir / "sweep.csv",
                          {"q", "norm_inf", "min_u", "energy", "gamma1", "classification", "converged"});
            for (const auto& p : rep.points) {
                csv.row({fmt(p.q), fmt(p.norm_inf), fmt(p.min_u), fmt(p.energy), fmt(p.gamma1),
                         std::string(solution_kind_name(p.kind)), p.converged ? "1" : "0"});
            }
        }
        for (const auto& p : rep.points) converged += p.converged;
        total = rep.points.size();
        j["q_hat"] = opt(rep.q_hat);
        j["interval_ok"] = rep.interval_ok;
        j["regime"] = nullptr;
        j["bisection_steps"] = rep.bisection_steps;
    }
    j["points"] = total;
    j["converged_points"] = converged;
    if (c.output.json) write_json(dir / "sweep.json", j);
    return 5 * converged >= 4 * total ? kExitOk : kExitNonconverged;
}

int cmd_eigen(const RunConfig& c, const CommandOptions& o) {
    const Grid grid = c.grid();
    const ScalarField a = eval_weight(c.weight, grid);
    const EigenPair ep = principal_eigenpair(a, c.bc);
    const fs::path dir = prepare_dir(c, o);
    if (c.output.csv) {
        CsvWriter csv(dir / "eigen.csv", {"x", "phi", "a"});
        for (std::size_t i = 0; i < grid.size(); ++i) csv.row({fmt(grid.x(i)), fmt(ep.phi[i]), fmt(a[i])});
    }
    if (c.output.json) {
        write_json(dir / "eigen.json", {{"command", "eigen"},
                                        {"bc", bc_name(c.bc)},
                                        {"mu", ep.mu},
                                        {"residual_inf", ep.residual_inf},
                                        {"bisection_steps", ep.bisection_steps},
                                        {"inertia_monotone", ep.inertia_monotone}});
    }
    return kExitOk;
}

int cmd_poisson(const RunConfig& c, const CommandOptions& o) {
    const Grid grid = c.grid();
    const ScalarField a = eval_weight(c.weight, grid);
    const ScalarField s = solve_poisson(a, c.bc);
    const fs::path dir = prepare_dir(c, o);
    if (c.output.csv) {
        CsvWriter csv(dir / "poisson.csv", {"x", "s", "a"});
        for (std::size_t i = 0; i < grid.size(); ++i) csv.row({fmt(grid.x(i)), fmt(s[i]), fmt(a[i])});
    }
    if (c.output.json) {
        write_json(dir / "poisson.json", {{"command", "poisson"},
                                          {"bc", bc_name(c.bc)},
                                          {"norm_inf", s.max_abs()},
                                          {"min", s.min()},
                                          {"max", s.max()},
                                          {"min_interior", unknown_min(s, c.bc)}});
    }
    return kExitOk;
}

int cmd_conditions(const RunConfig& c, const CommandOptions& o) {
    const Grid grid = c.grid();
    if (grid.is_radial() && !c.q) throw Error(ErrorKind::Config, "conditions on a radial grid need q");
    const ConditionReport rep = check_conditions(c.weight, grid, c.q, c.regions);
    const fs::path dir = prepare_dir(c, o);
    json j = conditions_json(rep);
    j["command"] = "conditions";
    j["q"] = opt(c.q);
    write_json(dir / "conditions.json", j);
    return kExitOk;
}

int cmd_deadcore(const RunConfig& c, const CommandOptions& o) {
    const double q = require_q(c, "deadcore");
    const auto* fam = std::get_if<DeltaFamily>(&c.weight);
    if (fam == nullptr) throw Error(ErrorKind::Config, "deadcore needs a delta_family weight");
    if (c.deadcore.deltas.empty()) throw Error(ErrorKind::Config, "deadcore needs deadcore.deltas");
    const Grid grid = c.grid();
    const ScalarField b1 = sample(fam->b1, grid);
    const ScalarField b2 = sample(fam->b2, grid);
    const DeltaSweepReport rep = deadcore_delta_sweep(b1, b2, q, c.deadcore.rho, c.deadcore.deltas, c.bc, c.solver);
    const fs::path dir = prepare_dir(c, o);
    if (c.output.csv) {
        CsvWriter csv(dir / "deadcore.csv",
                      {"delta", "converged", "nontrivial_solutions", "max_on_core", "vanishes_on_core"});
        for (const auto& r : rep.rows) {
            csv.row({fmt(r.delta), r.converged ? "1" : "0", std::to_string(r.nontrivial_solutions), fmt(r.max_on_core),
                     r.vanishes_on_core ? "1" : "0"});
        }
    }
    bool all = true;
    for (const auto& r : rep.rows) all = all && r.converged;
    if (c.output.json) {
        write_json(dir / "deadcore.json", {{"command", "deadcore"},
                                           {"q", q},
                                           {"rho", c.deadcore.rho},
                                           {"core_nodes", rep.core.size()},
                                           {"delta_first_deadcore", opt(rep.delta_first_deadcore)}});
    }
    return all ? kExitOk : kExitNonconverged;
}

int cmd_verify(const VerifyOptions& v, std::ostream& out) {
    const auto& checks = acceptance_checks();
    auto known = [&](const std::string& name) {
        for (const auto& c : checks) {
            if (c.name == name) return true;
        }
        return false;
    };
    if (v.list) {
        for (const auto& c : checks) out << c.id << ' ' << c.name << "  " << c.summary << '\n';
        return kExitOk;
    }
    for (const auto* name : {&v.only, &v.corrupt}) {
        if (*name && !known(**name)) {
            std::cerr << "unknown check '" << **name << "'\n";
            return kExitConfig;
        }
    }
    const auto reports = run_acceptance(out, v.only, v.corrupt);
    int failed = 0;
    for (const auto& r : reports) failed += !r.passed;
    out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
    for (const auto& r : reports) {
        if (!r.passed) out << "failed: " << r.name << '\n';
    }
    return failed == 0 ? kExitOk : kExitVerify;
}

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config:
        case ErrorKind::DegenerateInterval:
        case ErrorKind::TooFewNodes:
        case ErrorKind::InvalidDimension:
        case ErrorKind::DomainMismatch:
        case ErrorKind::UnsupportedBC:
        case ErrorKind::InvalidArgument:
        case ErrorKind::MissingRegion:
        case ErrorKind::B1B2Violation:
            return kExitConfig;
        default:
            return kExitNonconverged;
    }
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Sublinear indefinite elliptic problems: -Δu = a(x) u^q, 0 < q < 1"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions options;
    std::string out_dir;
    using Command = int (*)(const RunConfig&, const CommandOptions&);
    const std::vector<std::tuple<const char*, const char*, Command>> commands{
        {"solve", "ground state, classification and report", cmd_solve},
        {"sweep", "positivity sweep in q, or the q -> 1 branch", cmd_sweep},
        {"eigen", "principal eigenpair of -Δφ = μ a φ", cmd_eigen},
        {"poisson", "S(a), the Poisson solve of the weight", cmd_poisson},
        {"conditions", "structural conditions on the weight", cmd_conditions},
        {"deadcore", "dead cores along a_δ = b1 - δ b2", cmd_deadcore},
    };
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
        sub->add_option("-o,--out", out_dir, "output directory");
        sub->add_option("-j,--jobs", options.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
        subs.emplace_back(sub, fn);
    }
    VerifyOptions verify;
    CLI::App* vsub = app.add_subcommand("verify", "run the built-in acceptance checks");
    vsub->add_flag("--list", verify.list, "print the check names only");
    std::string only, corrupt;
    vsub->add_option("--only", only, "run one check");
    vsub->add_option("--corrupt", corrupt, "negative control: make this check fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (vsub->parsed()) {
            if (!only.empty()) verify.only = only;
            if (!corrupt.empty()) verify.corrupt = corrupt;
            return cmd_verify(verify, std::cout);
        }
        if (!out_dir.empty()) options.out = out_dir;
        for (const auto& [sub, fn] : subs) {
            if (sub->parsed()) return fn(load_config(config_path), options);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace sublin
