#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <specball/config.hpp>
#include <specball/quadrature.hpp>
#include <specball/solution_io.hpp>
#include <specball/study.hpp>

namespace {

/* max mixed (relative, absolute at zero) monomial error per total degree */
int run_quadcheck(int d, int q) {
    using namespace specball;
    auto mixed = [](double got, double exact) {
        const double scale = std::abs(exact) > 0.0 ? std::abs(exact) : 1.0;
        return std::abs(got - exact) / scale;
    };
    auto exact_ball = [](std::vector<int> a) {
        double log_num = 0.0;
        int total = 0;
        for (int ai : a) {
            if (ai % 2 != 0) return 0.0;
            log_num += std::lgamma((ai + 1) / 2.0);
            total += ai;
        }
        return std::exp(log_num - std::lgamma(1.0 + (a.size() + total) / 2.0));
    };

    const double tol = 1e-12;
    bool ok = true;
    std::printf("# %dD rule, q = %d\n", d, q);
    std::printf("%8s  %22s\n", "degree", "max_mixed_error");
    if (d == 2) {
        const QuadratureRule<2> rule = disk_rule(q);
        for (int deg = 0; deg <= rule.exactness; ++deg) {
            double worst = 0.0;
            for (int a = 0; a <= deg; ++a) {
                const int b = deg - a;
                const double got = rule.integrate(
                    [&](const Vec<2>& p) { return std::pow(p[0], a) * std::pow(p[1], b); });
                worst = std::max(worst, mixed(got, exact_ball({a, b})));
            }
            ok = ok && worst <= tol;
            std::printf("%8d  %22.3e\n", deg, worst);
        }
    } else {
        const QuadratureRule<3> rule = ball_rule(q);
        for (int deg = 0; deg <= rule.exactness; ++deg) {
            double worst = 0.0;
            for (int a = 0; a <= deg; ++a)
                for (int b = 0; a + b <= deg; ++b) {
                    const int c = deg - a - b;
                    const double got = rule.integrate([&](const Vec<3>& p) {
                        return std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c);
                    });
                    worst = std::max(worst, mixed(got, exact_ball({a, b, c})));
                }
            ok = ok && worst <= tol;
            std::printf("%8d  %22.3e\n", deg, worst);
        }
    }
    std::printf("%s (tolerance %.0e through declared degree)\n", ok ? "PASS" : "FAIL", tol);
    return ok ? 0 : 1;
}

struct SolveOptions {
    std::string config_path;
    std::string csv_path;
    std::string solution_path;
    bool quiet = false;
};

template <int D>
int run_solve_dim(const specball::config::Raw& raw, const SolveOptions& opt) {
    using namespace specball;
    const config::Loaded<D> loaded = config::build<D>(raw);

    if (!opt.quiet) {
        std::printf("problem   %s (%dD, map %s)\n", loaded.entry.problem.name.c_str(), D,
                    loaded.entry.problem.map.name.c_str());
        if (!loaded.entry.summary.empty()) std::printf("          %s\n", loaded.entry.summary.c_str());
        std::printf("degrees   %d..%d\n", loaded.solve.n_start, loaded.solve.n_end);
        if (loaded.entry.truth_ball)
            std::printf("errors    against the analytic solution\n");
        else if (loaded.entry.reference_degree > 0)
            std::printf("errors    against a degree-%d reference solve\n",
                        loaded.entry.reference_degree);
        std::fflush(stdout);
    }

    const Study<D> study =
        run_study(loaded.entry.problem, loaded.solve, loaded.entry.truth_ball,
                  loaded.entry.truth_ball ? -1 : loaded.entry.reference_degree);

    if (!opt.quiet) write_table(std::cout, study.rows);
    if (!study.run.ok) std::fprintf(stderr, "error: %s\n", study.run.message.c_str());

    if (!opt.csv_path.empty()) {
        std::ofstream csv(opt.csv_path);
        if (!csv) {
            std::fprintf(stderr, "error: cannot write '%s'\n", opt.csv_path.c_str());
            return 1;
        }
        write_csv(csv, study.rows);
        if (!opt.quiet) std::printf("wrote %s\n", opt.csv_path.c_str());
    }
    if (!opt.solution_path.empty() && !study.run.solutions.empty()) {
        save_solution_file(opt.solution_path, study.run.solutions.back());
        if (!opt.quiet) std::printf("wrote %s\n", opt.solution_path.c_str());
    }
    return study.run.ok ? 0 : 2;
}

int run_solve(const SolveOptions& opt) {
    const specball::config::Raw raw = specball::config::parse_file(opt.config_path);
    const int d = specball::config::dimension(raw);
    return d == 2 ? run_solve_dim<2>(raw, opt) : run_solve_dim<3>(raw, opt);
}

template <int D>
int run_eval_dim(const std::string& solution_path, const std::string& points_path, bool ball) {
    using namespace specball;
    const SpectralSolution<D> sol = load_solution_file<D>(solution_path);

    std::ifstream pts(points_path);
    if (!pts) {
        std::fprintf(stderr, "error: cannot open points file '%s'\n", points_path.c_str());
        return 1;
    }
    std::string line;
    int lineno = 0;
    while (std::getline(pts, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        std::istringstream fields(line);
        Vec<D> p;
        if (!(fields >> p[0])) continue;  // blank or comment-only line
        for (int i = 1; i < D; ++i)
            if (!(fields >> p[i])) {
                std::fprintf(stderr, "error: %s:%d: expected %d coordinates\n",
                             points_path.c_str(), lineno, D);
                return 1;
            }
        double extra;
        if (fields >> extra) {
            std::fprintf(stderr, "error: %s:%d: expected %d coordinates\n", points_path.c_str(),
                         lineno, D);
            return 1;
        }
        const double value = ball ? sol.eval_ball(p) : sol.eval_physical(p);
        std::printf("%.17g\n", value);
    }
    return 0;
}

int run_eval(const std::string& solution_path, const std::string& points_path, bool ball) {
    const int d = specball::solution_file_dimension(solution_path);
    return d == 2 ? run_eval_dim<2>(solution_path, points_path, ball)
                  : run_eval_dim<3>(solution_path, points_path, ball);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral Galerkin solver on ball-diffeomorphic domains"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "run a degree-continuation study from a config");
    solve->add_option("config", solve_opt.config_path, "INI-style problem description")
        ->required()
        ->check(CLI::ExistingFile);
    solve->add_option("--csv", solve_opt.csv_path, "write the study table as CSV");
    solve->add_option("--save", solve_opt.solution_path, "save the final-degree solution");
    solve->add_flag("--quiet", solve_opt.quiet, "suppress the human-readable table");

    std::string eval_solution, eval_points;
    bool eval_ball_points = false;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a saved solution at points");
    eval->add_option("solution", eval_solution, "solution file written by solve --save")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("points", eval_points, "one point per line, whitespace-separated coordinates")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_flag("--ball", eval_ball_points,
                   "interpret points as unit-ball coordinates instead of physical ones");

    int qc_d = 2, qc_q = 4;
    CLI::App* quadcheck = app.add_subcommand("quadcheck", "verify quadrature exactness");
    quadcheck->add_option("d", qc_d, "dimension (2 or 3)")->required()->check(CLI::IsMember({2, 3}));
    quadcheck->add_option("q", qc_q, "rule order")->required()->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(solve_opt);
        if (eval->parsed()) return run_eval(eval_solution, eval_points, eval_ball_points);
        if (quadcheck->parsed()) return run_quadcheck(qc_d, qc_q);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
