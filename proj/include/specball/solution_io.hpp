#pragma once

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "basis.hpp"
#include "expression.hpp"
#include "geometry.hpp"
#include "problems.hpp"
#include "solver.hpp"

namespace specball {

/* Plain-text solution persistence.  Numbers are written with 17 significant
 * digits, so save -> load -> save reproduces the file byte for byte and the
 * loaded expansion evaluates bit-identically.  Only maps built from a spec
 * string and shifts with a reparseable expression can pass through. */

inline constexpr const char* solution_magic = "specball-solution";
inline constexpr int solution_format_version = 1;

namespace io_detail {

inline std::string expect_line(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("solution file ended early; expected '" + key + "'");
    if (line.rfind(key + " ", 0) != 0 && line != key)
        throw std::runtime_error("solution file: expected '" + key + " ...', got '" + line + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

inline double parse_double(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) throw std::runtime_error("solution file: bad number '" + text + "'");
    return v;
}

inline long parse_int(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s) throw std::runtime_error("solution file: bad integer '" + text + "'");
    return v;
}

}  // namespace io_detail

template <int D>
void save_solution(std::ostream& out, const SpectralSolution<D>& sol) {
    if (sol.map.spec.empty())
        throw std::invalid_argument(
            "save_solution: the domain map has no spec string; custom maps cannot be persisted");
    if (sol.shift && sol.shift_text.empty())
        throw std::invalid_argument(
            "save_solution: the solution carries a shift with no expression form");
    if (sol.coefficients.size() != sol.basis.size())
        throw std::invalid_argument("save_solution: coefficient/basis size mismatch");

    out << solution_magic << " " << solution_format_version << "\n";
    out << "problem " << sol.problem_name << "\n";
    out << "dimension " << D << "\n";
    out << "map " << sol.map.spec << "\n";
    out << "basis " << (sol.basis.kind() == BasisSet<D>::Kind::bubble ? "bubble" : "plain") << " "
        << sol.basis.degree() << "\n";
    out << "degree " << sol.degree << "\n";
    out << "converged " << (sol.converged ? 1 : 0) << "\n";
    out << "newton_iterations " << sol.newton_iterations << "\n";
    out << "residual_inf " << detail::full_precision(sol.residual_inf) << "\n";
    out << "shift " << (sol.shift ? sol.shift_text : std::string("-")) << "\n";
    out << "coefficients " << sol.coefficients.size() << "\n";
    for (Eigen::Index i = 0; i < sol.coefficients.size(); ++i)
        out << detail::full_precision(sol.coefficients[i]) << "\n";
    if (!out) throw std::runtime_error("save_solution: write failed");
}

template <int D>
void save_solution_file(const std::string& path, const SpectralSolution<D>& sol) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_solution: cannot open '" + path + "'");
    save_solution(out, sol);
}

/* Reads just enough of the header to learn the dimension, so the caller can
 * dispatch to the right template instantiation. */
inline int solution_file_dimension(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solution file '" + path + "'");
    const std::string header = io_detail::expect_line(in, solution_magic);
    if (io_detail::parse_int(header) != solution_format_version)
        throw std::runtime_error("unsupported solution format version '" + header + "'");
    io_detail::expect_line(in, "problem");
    const int d = static_cast<int>(io_detail::parse_int(io_detail::expect_line(in, "dimension")));
    if (d != 2 && d != 3)
        throw std::runtime_error("solution file: dimension must be 2 or 3, got " +
                                 std::to_string(d));
    return d;
}

template <int D>
SpectralSolution<D> load_solution(std::istream& in) {
    using io_detail::expect_line;
    using io_detail::parse_double;
    using io_detail::parse_int;

    const std::string header = expect_line(in, solution_magic);
    if (parse_int(header) != solution_format_version)
        throw std::runtime_error("unsupported solution format version '" + header + "'");

    const std::string problem_name = expect_line(in, "problem");
    const int d = static_cast<int>(parse_int(expect_line(in, "dimension")));
    if (d != D)
        throw std::runtime_error("solution file is " + std::to_string(d) + "D, expected " +
                                 std::to_string(D) + "D");
    const DomainMap<D> map = map_from_spec<D>(expect_line(in, "map"));

    std::istringstream basis_line(expect_line(in, "basis"));
    std::string kind;
    int basis_degree = -1;
    if (!(basis_line >> kind >> basis_degree) || (kind != "plain" && kind != "bubble"))
        throw std::runtime_error("solution file: bad basis line");

    SpectralSolution<D> sol{problem_name,
                            kind == "bubble" ? BasisSet<D>::bubble_basis(basis_degree)
                                             : BasisSet<D>::plain_basis(basis_degree),
                            VectorXd(),
                            0,
                            map,
                            {},
                            {}};
    sol.degree = static_cast<int>(parse_int(expect_line(in, "degree")));
    sol.converged = parse_int(expect_line(in, "converged")) != 0;
    sol.newton_iterations = static_cast<int>(parse_int(expect_line(in, "newton_iterations")));
    sol.residual_inf = parse_double(expect_line(in, "residual_inf"));

    const std::string shift_text = expect_line(in, "shift");
    if (shift_text != "-") {
        sol.shift_text = shift_text;
        const expr::Expr g = expr::Expr::parse(shift_text);
        const auto allowed = D == 2 ? std::vector<expr::Var>{expr::Var::s, expr::Var::t}
                                    : std::vector<expr::Var>{expr::Var::s, expr::Var::t,
                                                             expr::Var::v};
        expr::require_variables(g, allowed, "solution shift");
        sol.shift = [g, phi = sol.map.phi](const Vec<D>& x) {
            return g.eval(bridge::physical_env<D>(phi(x)));
        };
    }

    const long count = parse_int(expect_line(in, "coefficients"));
    if (count != sol.basis.size())
        throw std::runtime_error("solution file: " + std::to_string(count) +
                                 " coefficients for a basis of size " +
                                 std::to_string(sol.basis.size()));
    sol.coefficients.resize(count);
    std::string line;
    for (long i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("solution file: coefficient list ended early");
        sol.coefficients[i] = parse_double(line);
    }
    return sol;
}

template <int D>
SpectralSolution<D> load_solution_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solution file '" + path + "'");
    return load_solution<D>(in);
}

}  // namespace specball
