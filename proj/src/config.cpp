#include "sublin/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "sublin/errors.hpp"

namespace sublin {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Config, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing key '") + key + "'");
    return obj.at(key);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_plain(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        fail(where, "not a number: '" + text + "'");
    }
    if (used != text.size()) fail(where, "not a number: '" + text + "'");
    return v;
}

int parse_int(const json& value, const std::string& where) {
    if (!value.is_number_integer()) fail(where, "expected an integer");
    return value.get<int>();
}

std::vector<double> parse_numbers(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(parse_number(value[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Geometry parse_geometry(const json& g) {
    const std::string type = lower(require(g, "type", "problem.geometry").get<std::string>());
    if (type == "line") {
        return LineGeometry{parse_number(require(g, "lo", "problem.geometry"), "problem.geometry.lo"),
                            parse_number(require(g, "hi", "problem.geometry"), "problem.geometry.hi")};
    }
    if (type == "radial") {
        return RadialGeometry{parse_number(require(g, "radius", "problem.geometry"), "problem.geometry.radius"),
                              parse_int(require(g, "dim", "problem.geometry"), "problem.geometry.dim")};
    }
    fail("problem.geometry.type", "expected 'line' or 'radial'");
}

BoundaryCondition parse_bc(const json& v) {
    if (!v.is_string()) fail("problem.bc", "expected a string");
    const std::string s = lower(v.get<std::string>());
    if (s == "dirichlet") return BoundaryCondition::Dirichlet;
    if (s == "neumann") return BoundaryCondition::Neumann;
    fail("problem.bc", "expected 'dirichlet' or 'neumann'");
}

WeightSpec parse_weight(const json& w, const Grid& grid, std::optional<double> run_q) {
    const std::string type = lower(require(w, "type", "weight").get<std::string>());
    if (type == "example_cos") {
        ExampleCos e;
        if (w.contains("q")) {
            e.q = parse_number(w.at("q"), "weight.q");
        } else if (run_q) {
            e.q = *run_q;
        } else {
            fail("weight.q", "example_cos needs q (or a top-level q)");
        }
        return e;
    }
    if (type == "radial_piecewise") {
        RadialPiecewise r;
        r.a_plus = parse_profile(require(w, "a_plus", "weight"), "weight.a_plus");
        r.a_minus = parse_profile(require(w, "a_minus", "weight"), "weight.a_minus");
        r.r0 = parse_number(require(w, "r0", "weight"), "weight.r0");
        r.r = parse_number(require(w, "r", "weight"), "weight.r");
        const std::string layout = lower(w.value("layout", std::string("inner_positive")));
        if (layout == "inner_positive") {
            r.layout = RadialLayout::InnerPositive;
        } else if (layout == "inner_negative") {
            r.layout = RadialLayout::InnerNegative;
        } else {
            fail("weight.layout", "expected 'inner_positive' or 'inner_negative'");
        }
        return r;
    }
    if (type == "delta_family") {
        DeltaFamily d;
        d.b1 = parse_profile(require(w, "b1", "weight"), "weight.b1");
        d.b2 = parse_profile(require(w, "b2", "weight"), "weight.b2");
        d.delta = w.contains("delta") ? parse_number(w.at("delta"), "weight.delta") : 0.0;
        return d;
    }
    if (type == "table") {
        if (w.contains("values")) {
            const auto v = parse_numbers(w.at("values"), "weight.values");
            if (v.size() != grid.size()) {
                fail("weight.values", "expected " + std::to_string(grid.size()) + " values (n_interior + 2)");
            }
            return Table{ScalarField(grid, v)};
        }
        return Table{sample(parse_profile(require(w, "profile", "weight"), "weight.profile"), grid)};
    }
    fail("weight.type", "expected example_cos, radial_piecewise, delta_family or table");
}

}  // namespace

double parse_number(const json& value, const std::string& where) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) fail(where, "expected a number");
    std::string s;
    for (char c : value.get<std::string>()) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    const auto at = s.find("pi");
    if (at == std::string::npos) return parse_plain(s, where);
    std::string before = s.substr(0, at), after = s.substr(at + 2);
    double v = std::numbers::pi;
    if (!before.empty()) {
        if (before.back() == '*') before.pop_back();
        if (before == "-") {
            v = -v;
        } else if (!before.empty()) {
            v *= parse_plain(before, where);
        }
    }
    if (!after.empty()) {
        if (after.front() == '/') {
            v /= parse_plain(after.substr(1), where);
        } else if (after.front() == '*') {
            v *= parse_plain(after.substr(1), where);
        } else {
            fail(where, "cannot read '" + value.get<std::string>() + "'");
        }
    }
    return v;
}

Profile parse_profile(const json& value, const std::string& where) {
    if (value.is_number() || value.is_string()) return Profile::constant(parse_number(value, where));
    const std::string kind = lower(require(value, "kind", where).get<std::string>());
    if (kind == "constant") return Profile::constant(parse_number(require(value, "value", where), where + ".value"));
    if (kind == "piecewise") {
        const json& arr = require(value, "pieces", where);
        if (!arr.is_array()) fail(where + ".pieces", "expected an array");
        std::vector<PolyPiece> pieces;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = where + ".pieces[" + std::to_string(i) + "]";
            PolyPiece p;
            p.lo = parse_number(require(arr[i], "lo", at), at + ".lo");
            p.hi = parse_number(require(arr[i], "hi", at), at + ".hi");
            p.coeffs = parse_numbers(require(arr[i], "coeffs", at), at + ".coeffs");
            if (!(p.lo <= p.hi)) fail(at, "lo must not exceed hi");
            pieces.push_back(std::move(p));
        }
        return Profile::piecewise(std::move(pieces));
    }
    if (kind == "trig") {
        std::vector<TrigTerm> terms;
        if (value.contains("terms")) {
            const json& arr = value.at("terms");
            if (!arr.is_array()) fail(where + ".terms", "expected an array");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string at = where + ".terms[" + std::to_string(i) + "]";
                TrigTerm t;
                t.amplitude = parse_number(require(arr[i], "amplitude", at), at + ".amplitude");
                if (arr[i].contains("frequency")) t.frequency = parse_number(arr[i].at("frequency"), at + ".frequency");
                if (arr[i].contains("phase")) t.phase = parse_number(arr[i].at("phase"), at + ".phase");
                terms.push_back(t);
            }
        }
        const double offset = value.contains("offset") ? parse_number(value.at("offset"), where + ".offset") : 0.0;
        return Profile::trig(offset, std::move(terms));
    }
    fail(where + ".kind", "expected constant, piecewise or trig");
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("config", "expected a JSON object");
    RunConfig c;
    try {
        const json& problem = require(doc, "problem", "config");
        c.geometry = parse_geometry(require(problem, "geometry", "problem"));
        c.bc = parse_bc(require(problem, "bc", "problem"));
        if (problem.contains("n_interior")) c.n_interior = parse_int(problem.at("n_interior"), "problem.n_interior");
        const Grid grid = c.grid();

        if (doc.contains("q") && !doc.at("q").is_null()) {
            c.q = parse_number(doc.at("q"), "q");
            if (!(*c.q > 0.0 && *c.q < 1.0)) fail("q", "must lie in (0, 1)");
        }
        if (doc.contains("q_grid")) {
            const json& qg = doc.at("q_grid");
            if (qg.is_object()) {
                const double from = parse_number(require(qg, "from", "q_grid"), "q_grid.from");
                const double to = parse_number(require(qg, "to", "q_grid"), "q_grid.to");
                const int count = parse_int(require(qg, "count", "q_grid"), "q_grid.count");
                if (count < 1) fail("q_grid.count", "must be >= 1");
                for (int i = 0; i < count; ++i) {
                    c.q_grid.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
                }
            } else {
                c.q_grid = parse_numbers(qg, "q_grid");
            }
            for (double q : c.q_grid) {
                if (!(q > 0.0 && q < 1.0)) fail("q_grid", "values must lie in (0, 1)");
            }
        }
        c.weight = parse_weight(require(doc, "weight", "config"), grid, c.q);

        if (doc.contains("solver")) {
            const json& s = doc.at("solver");
            if (s.contains("tol_res")) c.solver.tol_res = parse_number(s.at("tol_res"), "solver.tol_res");
            if (s.contains("max_starts")) c.solver.max_starts = parse_int(s.at("max_starts"), "solver.max_starts");
            if (s.contains("seed")) {
                if (!s.at("seed").is_number_unsigned()) fail("solver.seed", "expected a nonnegative integer");
                c.solver.seed = s.at("seed").get<std::uint64_t>();
            }
            if (s.contains("max_iter")) c.solver.max_iter = parse_int(s.at("max_iter"), "solver.max_iter");
            if (s.contains("max_newton")) c.solver.max_newton = parse_int(s.at("max_newton"), "solver.max_newton");
            if (s.contains("active_threshold")) {
                c.solver.active_threshold = parse_number(s.at("active_threshold"), "solver.active_threshold");
            }
            if (!(c.solver.tol_res > 0.0) || c.solver.max_starts < 1 || c.solver.max_iter < 1 || c.solver.max_newton < 1 ||
                !(c.solver.active_threshold > 0.0)) {
                fail("solver", "tolerances and iteration caps must be positive");
            }
        }
        if (doc.contains("output")) {
            const json& o = doc.at("output");
            if (o.contains("dir")) c.output.dir = o.at("dir").get<std::string>();
            if (o.contains("formats")) {
                c.output.csv = c.output.json = false;
                for (const auto& f : o.at("formats")) {
                    const std::string s = lower(f.get<std::string>());
                    if (s == "csv") {
                        c.output.csv = true;
                    } else if (s == "json") {
                        c.output.json = true;
                    } else {
                        fail("output.formats", "expected csv and/or json");
                    }
                }
            }
        }
        if (doc.contains("regions")) {
            const json& r = doc.at("regions");
            if (r.contains("r0")) c.regions.r0 = parse_number(r.at("r0"), "regions.r0");
            if (r.contains("r")) c.regions.r = parse_number(r.at("r"), "regions.r");
            if (r.contains("rho0")) c.regions.rho0 = parse_number(r.at("rho0"), "regions.rho0");
        }
        if (doc.contains("sweep")) {
            const json& s = doc.at("sweep");
            c.branch = s.value("branch", false);
            if (s.contains("resolution")) c.resolution = parse_number(s.at("resolution"), "sweep.resolution");
            if (!(c.resolution > 0.0)) fail("sweep.resolution", "must be positive");
        }
        if (doc.contains("deadcore")) {
            const json& d = doc.at("deadcore");
            if (d.contains("rho")) c.deadcore.rho = parse_number(d.at("rho"), "deadcore.rho");
            if (d.contains("deltas")) c.deadcore.deltas = parse_numbers(d.at("deltas"), "deadcore.deltas");
        }
    } catch (const json::exception& e) {
        fail("config", e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        fail("config", e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path.string(), "cannot open");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path.string(), std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace sublin
