#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <specball/config.hpp>
#include <specball/solution_io.hpp>
#include <specball/study.hpp>

using namespace specball;

TEST_CASE("study against an analytic solution: rows, sizes, decreasing errors") {
    auto entry = make_manufactured_disk();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 8;
    const auto study = run_study(entry.problem, cfg, entry.truth_ball, -1);
    REQUIRE(study.run.ok);
    CHECK(study.error_kind == Study<2>::ErrorKind::truth);
    CHECK_FALSE(study.reference.has_value());
    REQUIRE(study.rows.size() == 8);
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
        const auto& row = study.rows[i];
        CHECK(row.n == static_cast<int>(i) + 1);
        CHECK(row.basis_size == poly_space_dim(2, row.n));
        CHECK(row.newton_iterations <= 1);
        CHECK(std::isfinite(row.max_error));
    }
    CHECK(study.rows.back().max_error < 1e-6);
    CHECK(study.rows.back().max_error < 1e-4 * study.rows.front().max_error);
}

TEST_CASE("study against a higher-degree reference solve") {
    const auto entry = make_planar_cos();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 4;
    const auto study = run_study(entry.problem, cfg, nullptr, 7);
    REQUIRE(study.run.ok);
    CHECK(study.error_kind == Study<2>::ErrorKind::reference);
    REQUIRE(study.reference.has_value());
    CHECK(study.reference->degree == 7);
    REQUIRE(study.rows.size() == 4);
    CHECK(study.rows.back().max_error < study.rows.front().max_error);
    CHECK(study.rows.back().max_error > 0.0);

    CHECK_THROWS_AS(run_study(entry.problem, cfg, nullptr, 4), std::invalid_argument);
}

TEST_CASE("study with neither truth nor reference leaves the error column NaN") {
    const auto entry = make_planar_cos();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 3;
    const auto study = run_study(entry.problem, cfg, nullptr, -1);
    CHECK(study.error_kind == Study<2>::ErrorKind::none);
    for (const auto& row : study.rows) CHECK(std::isnan(row.max_error));
}

TEST_CASE("csv writer emits the fixed header and full-precision numbers") {
    std::vector<StudyRow> rows{{3, 10, 2, 1.25e-13, 0.0078125},
                               {4, 15, 1, std::numeric_limits<double>::quiet_NaN(), 0.5}};
    std::ostringstream out;
    write_csv(out, rows);
    std::istringstream lines(out.str());
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "n,N_n,newton_iters,residual_inf,max_error");
    REQUIRE(std::getline(lines, line));
    CHECK(line == "3,10,2,1.25e-13,0.0078125");
    REQUIRE(std::getline(lines, line));
    CHECK(line.rfind("4,15,1,nan,", 0) == 0);
    CHECK_FALSE(std::getline(lines, line));
}

TEST_CASE("table writer lines up columns and keeps every row") {
    std::vector<StudyRow> rows{{3, 10, 2, 1e-13, 1e-2}, {12, 91, 1, 2e-14, 3e-9}};
    std::ostringstream out;
    write_table(out, rows);
    const std::string text = out.str();
    CHECK(text.find("n") != std::string::npos);
    CHECK(text.find("N_n") != std::string::npos);
    CHECK(text.find("max_error") != std::string::npos);
    CHECK(text.find("91") != std::string::npos);
    CHECK(text.find("3.000e-09") != std::string::npos);
}

TEST_CASE("solution round trip is bit exact, including a second save") {
    const auto entry = make_manufactured_quadratic();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 6;
    const auto run = continue_in_degree(entry.problem, cfg);
    REQUIRE(run.ok);
    const auto& sol = run.solutions.back();

    std::ostringstream first;
    save_solution(first, sol);
    std::istringstream in(first.str());
    const auto loaded = load_solution<2>(in);

    CHECK(loaded.problem_name == sol.problem_name);
    CHECK(loaded.degree == sol.degree);
    CHECK(loaded.basis.size() == sol.basis.size());
    CHECK(loaded.basis.kind() == sol.basis.kind());
    CHECK(loaded.map.spec == sol.map.spec);
    CHECK(loaded.newton_iterations == sol.newton_iterations);
    CHECK(loaded.residual_inf == sol.residual_inf);
    REQUIRE(loaded.coefficients.size() == sol.coefficients.size());
    for (Eigen::Index i = 0; i < sol.coefficients.size(); ++i)
        CHECK(loaded.coefficients[i] == sol.coefficients[i]);

    for (const Vec<2>& p : {Vec<2>{0.0, 0.0}, Vec<2>{0.31, -0.44}, Vec<2>{-0.8, 0.1}})
        CHECK(loaded.eval_ball(p) == sol.eval_ball(p));
    // physical evaluation uses the rebuilt inverse map
    const Vec<2> s = sol.map.phi(Vec<2>{0.25, 0.5});
    CHECK(loaded.eval_physical(s) == sol.eval_physical(s));

    std::ostringstream second;
    save_solution(second, loaded);
    CHECK(second.str() == first.str());
}

TEST_CASE("solutions carrying a Dirichlet shift persist through the lift expression") {
    const auto loaded_cfg = config::build<2>(config::parse_string(
        "[problem]\n"
        "name = lifted\n"
        "f = 4\n"
        "bc = dirichlet\n"
        "lift = s - t\n"
        "lift_Lg = 0\n"));
    SolveConfig cfg = loaded_cfg.solve;
    cfg.n_end = 4;
    const auto run = continue_in_degree(loaded_cfg.entry.problem, cfg);
    REQUIRE(run.ok);
    const auto& sol = run.solutions.back();
    REQUIRE(sol.shift);
    REQUIRE(sol.shift_text == "s - t");

    std::ostringstream out;
    save_solution(out, sol);
    std::istringstream in(out.str());
    const auto loaded = load_solution<2>(in);
    REQUIRE(loaded.shift);
    for (const Vec<2>& p : {Vec<2>{0.1, 0.2}, Vec<2>{-0.63, 0.05}})
        CHECK(loaded.eval_ball(p) == sol.eval_ball(p));
    // u = 1 - r^2 + (s - t); spot-check the lifted value itself
    CHECK(loaded.eval_ball(Vec<2>{0.5, 0.0}) == Catch::Approx(0.75 + 0.5).epsilon(1e-10));
}

TEST_CASE("solution io rejects what it cannot faithfully rebuild") {
    const auto entry = make_manufactured_disk();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 2;
    auto run = continue_in_degree(entry.problem, cfg);
    REQUIRE(run.ok);

    SECTION("custom map without a spec string") {
        auto sol = run.solutions.back();
        sol.map.spec.clear();
        std::ostringstream out;
        CHECK_THROWS_AS(save_solution(out, sol), std::invalid_argument);
    }
    SECTION("shift closure without an expression form") {
        auto sol = run.solutions.back();
        sol.shift = [](const Vec<2>&) { return 1.0; };
        sol.shift_text.clear();
        std::ostringstream out;
        CHECK_THROWS_AS(save_solution(out, sol), std::invalid_argument);
    }
    SECTION("bad magic, wrong dimension, truncated coefficients") {
        std::ostringstream out;
        save_solution(out, run.solutions.back());
        const std::string good = out.str();

        std::istringstream bad_magic("not-a-solution 1\n");
        CHECK_THROWS_AS(load_solution<2>(bad_magic), std::runtime_error);

        std::istringstream wrong_dim(good);
        CHECK_THROWS_AS(load_solution<3>(wrong_dim), std::runtime_error);

        std::istringstream truncated(good.substr(0, good.size() - 25));
        CHECK_THROWS_AS(load_solution<2>(truncated), std::runtime_error);
    }
}

TEST_CASE("solution_file_dimension reads only the header") {
    const auto entry = make_manufactured_disk();
    SolveConfig cfg = entry.defaults;
    cfg.n_end = 1;
    const auto run = continue_in_degree(entry.problem, cfg);
    REQUIRE(run.ok);
    const std::string path = "dimension_probe.sol";
    save_solution_file(path, run.solutions.back());
    CHECK(solution_file_dimension(path) == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(solution_file_dimension("really-not-there.sol"), std::runtime_error);
}
