#pragma once

#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "expression.hpp"
#include "problems.hpp"
#include "solver.hpp"

namespace specball::config {

/* INI-style run description:
 *
 *   [problem]
 *   builtin = planar-cos          # a catalog entry, nothing else allowed
 *     -- or a custom problem --
 *   name = my-problem
 *   dimension = 2
 *   map = quadratic2d 0.95
 *   f = cos(pi*s*t)/(1 + u^2)     # variables s, t (, v in 3D) and u
 *   dfdz = ...                    # optional, defaults to the symbolic d f / d u
 *   gamma = 1                     # optional reaction coefficient, variables s, t (, v)
 *   truth = (1 - x^2 - y^2)*exp(x)  # optional known solution in ball coordinates
 *   bc = dirichlet_zero | dirichlet | neumann_zero | neumann
 *   boundary_data = ...           # neumann: the flux g
 *   lift = ...                    # dirichlet: a smooth extension G of the trace
 *   lift_Lg = ...                 # dirichlet: (L G) evaluated symbolically by the user
 *
 *   [solver]   overrides of the solver defaults (n_start, n_end, newton_tol, ...)
 *   [study]    reference_degree = 25
 *
 * '#' or ';' starts a comment; keys are case-sensitive; unknown keys are
 * rejected so typos fail loudly. */

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    std::string value;
    int line = 0;
};

struct Raw {
    std::string source;  // path or "<string>", for error messages
    std::map<std::string, std::map<std::string, Entry>> sections;

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections.find(section);
        return s != sections.end() && s->second.count(key) > 0;
    }
    const Entry& at(const std::string& section, const std::string& key) const {
        return sections.at(section).at(key);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void fail(const Raw& raw, int line, const std::string& what) {
    throw ConfigError(raw.source + ":" + std::to_string(line) + ": " + what);
}

inline double to_double(const Raw& raw, const Entry& e, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        fail(raw, e.line, "value of '" + key + "' is not a number: '" + e.value + "'");
    return v;
}

inline int to_int(const Raw& raw, const Entry& e, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
        fail(raw, e.line, "value of '" + key + "' is not an integer: '" + e.value + "'");
    return static_cast<int>(v);
}

inline expr::Expr to_expr(const Raw& raw, const Entry& e, const std::string& key,
                          const std::vector<expr::Var>& allowed) {
    try {
        const expr::Expr parsed = expr::Expr::parse(e.value);
        expr::require_variables(parsed, allowed, "'" + key + "'");
        return parsed;
    } catch (const expr::ParseError& pe) {
        fail(raw, e.line, "cannot parse '" + key + "': " + pe.what());
    } catch (const std::invalid_argument& ia) {
        fail(raw, e.line, ia.what());
    }
}

inline void check_keys(const Raw& raw, const std::string& section,
                       const std::set<std::string>& allowed) {
    auto s = raw.sections.find(section);
    if (s == raw.sections.end()) return;
    for (const auto& [key, entry] : s->second)
        if (!allowed.count(key))
            fail(raw, entry.line, "unknown key '" + key + "' in [" + section + "]");
}

template <int D>
std::vector<expr::Var> physical_vars(bool with_u) {
    std::vector<expr::Var> v{expr::Var::s, expr::Var::t};
    if constexpr (D == 3) v.push_back(expr::Var::v);
    if (with_u) v.push_back(expr::Var::u);
    return v;
}

template <int D>
std::vector<expr::Var> ball_vars() {
    std::vector<expr::Var> v{expr::Var::x, expr::Var::y};
    if constexpr (D == 3) v.push_back(expr::Var::z);
    return v;
}

}  // namespace detail

inline Raw parse(std::istream& in, const std::string& source) {
    Raw raw;
    raw.source = source;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') detail::fail(raw, lineno, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "problem" && section != "solver" && section != "study")
                detail::fail(raw, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            detail::fail(raw, lineno, "expected 'key = value', got '" + line + "'");
        if (section.empty()) detail::fail(raw, lineno, "key before any [section]");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) detail::fail(raw, lineno, "empty key");
        if (!raw.sections[section].emplace(key, Entry{value, lineno}).second)
            detail::fail(raw, lineno, "duplicate key '" + key + "' in [" + section + "]");
    }
    return raw;
}

inline Raw parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

inline Raw parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in, "<string>");
}

/* Dimension is decided before building so the caller can pick the template
 * instantiation: the builtin's dimension, else the 'dimension' key (default 2). */
inline int dimension(const Raw& raw) {
    if (raw.has("problem", "builtin")) return catalog_dimension(raw.at("problem", "builtin").value);
    if (raw.has("problem", "dimension")) {
        const Entry& e = raw.at("problem", "dimension");
        const int d = detail::to_int(raw, e, "dimension");
        if (d != 2 && d != 3) detail::fail(raw, e.line, "dimension must be 2 or 3");
        return d;
    }
    return 2;
}

template <int D>
struct Loaded {
    CatalogEntry<D> entry;  // problem, optional truth, reference degree
    SolveConfig solve;      // catalog or stock defaults with [solver] overrides applied
};

template <int D>
CatalogEntry<D> build_problem(const Raw& raw) {
    using detail::fail;
    using detail::to_expr;

    if (raw.has("problem", "builtin")) {
        const Entry& b = raw.at("problem", "builtin");
        detail::check_keys(raw, "problem", {"builtin"});
        if (catalog_dimension(b.value) != D)
            fail(raw, b.line, "builtin '" + b.value + "' is not " + std::to_string(D) + "D");
        if constexpr (D == 2)
            return catalog_2d(b.value);
        else
            return catalog_3d(b.value);
    }

    detail::check_keys(raw, "problem",
                       {"name", "dimension", "map", "f", "dfdz", "gamma", "truth", "bc",
                        "boundary_data", "lift", "lift_Lg"});
    if (!raw.has("problem", "f"))
        throw ConfigError(raw.source + ": [problem] needs either 'builtin' or 'f'");

    CatalogEntry<D> e;
    e.problem.name = raw.has("problem", "name") ? raw.at("problem", "name").value : "custom";

    if (raw.has("problem", "map")) {
        const Entry& m = raw.at("problem", "map");
        try {
            e.problem.map = map_from_spec<D>(m.value);
        } catch (const std::invalid_argument& ia) {
            fail(raw, m.line, ia.what());
        }
    } else {
        e.problem.map = identity_map<D>();
    }

    const auto phys_u = detail::physical_vars<D>(true);
    const auto phys = detail::physical_vars<D>(false);

    const expr::Expr f = to_expr(raw, raw.at("problem", "f"), "f", phys_u);
    e.problem.f = bridge::nonlinearity<D>(f);
    e.problem.dfdz = raw.has("problem", "dfdz")
                         ? bridge::nonlinearity<D>(
                               to_expr(raw, raw.at("problem", "dfdz"), "dfdz", phys_u))
                         : bridge::nonlinearity<D>(f.derivative(expr::Var::u));
    if (raw.has("problem", "gamma"))
        e.problem.gamma =
            bridge::physical_scalar<D>(to_expr(raw, raw.at("problem", "gamma"), "gamma", phys));
    if (raw.has("problem", "truth"))
        e.truth_ball = bridge::ball_scalar<D>(
            to_expr(raw, raw.at("problem", "truth"), "truth", detail::ball_vars<D>()));

    using BC = BoundaryCondition<D>;
    const std::string bc =
        raw.has("problem", "bc") ? raw.at("problem", "bc").value : "dirichlet_zero";
    const int bc_line = raw.has("problem", "bc") ? raw.at("problem", "bc").line : 0;
    auto need = [&](const std::string& key) -> const Entry& {
        if (!raw.has("problem", key))
            throw ConfigError(raw.source + ": bc = " + bc + " requires '" + key + "'");
        return raw.at("problem", key);
    };
    if (bc == "dirichlet_zero") {
        e.problem.bc.kind = BC::Kind::dirichlet_zero;
    } else if (bc == "neumann_zero") {
        e.problem.bc.kind = BC::Kind::neumann_zero;
    } else if (bc == "neumann") {
        e.problem.bc.kind = BC::Kind::neumann;
        e.problem.bc.boundary_data =
            bridge::physical_scalar<D>(to_expr(raw, need("boundary_data"), "boundary_data", phys));
    } else if (bc == "dirichlet") {
        e.problem.bc.kind = BC::Kind::dirichlet;
        const Entry& lift = need("lift");
        e.problem.bc.lift = bridge::physical_scalar<D>(to_expr(raw, lift, "lift", phys));
        e.problem.bc.lift_text = lift.value;
        e.problem.bc.lift_Lg =
            bridge::physical_scalar<D>(to_expr(raw, need("lift_Lg"), "lift_Lg", phys));
        if (raw.has("problem", "boundary_data"))
            e.problem.bc.boundary_data = bridge::physical_scalar<D>(
                to_expr(raw, raw.at("problem", "boundary_data"), "boundary_data", phys));
    } else {
        fail(raw, bc_line, "unknown bc '" + bc + "'");
    }
    return e;
}

inline void apply_solver_overrides(const Raw& raw, SolveConfig& cfg) {
    using detail::fail;
    detail::check_keys(raw, "solver",
                       {"n_start", "n_end", "newton_tol", "max_newton_iterations",
                        "damping_factor", "max_damping_steps", "guess", "guess_value",
                        "quad_offset", "quad_override", "aux_degree", "aux_quad",
                        "boundary_order"});
    auto ival = [&](const std::string& key, int& slot) {
        if (raw.has("solver", key)) slot = detail::to_int(raw, raw.at("solver", key), key);
    };
    auto dval = [&](const std::string& key, double& slot) {
        if (raw.has("solver", key)) slot = detail::to_double(raw, raw.at("solver", key), key);
    };
    ival("n_start", cfg.n_start);
    ival("n_end", cfg.n_end);
    dval("newton_tol", cfg.newton_tol);
    ival("max_newton_iterations", cfg.max_newton_iterations);
    dval("damping_factor", cfg.damping_factor);
    ival("max_damping_steps", cfg.max_damping_steps);
    dval("guess_value", cfg.guess_value);
    ival("quad_offset", cfg.quad_offset);
    ival("quad_override", cfg.quad_override);
    ival("aux_degree", cfg.aux_degree);
    ival("aux_quad", cfg.aux_quad);
    ival("boundary_order", cfg.boundary_order);
    if (raw.has("solver", "guess")) {
        const Entry& g = raw.at("solver", "guess");
        if (g.value == "zeros")
            cfg.guess = SolveConfig::GuessKind::zeros;
        else if (g.value == "constant")
            cfg.guess = SolveConfig::GuessKind::constant;
        else
            fail(raw, g.line, "guess must be 'zeros' or 'constant', got '" + g.value + "'");
    }
}

template <int D>
Loaded<D> build(const Raw& raw) {
    Loaded<D> out;
    out.entry = build_problem<D>(raw);
    out.solve = out.entry.defaults;
    apply_solver_overrides(raw, out.solve);

    detail::check_keys(raw, "study", {"reference_degree"});
    if (raw.has("study", "reference_degree"))
        out.entry.reference_degree =
            detail::to_int(raw, raw.at("study", "reference_degree"), "reference_degree");
    return out;
}

}  // namespace specball::config
