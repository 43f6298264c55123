#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <specball/problems.hpp>

#include "oracle_helpers.hpp"

using namespace specball;

namespace {

/* central-difference Laplacian, O(h^2) accurate */
template <int D, class F>
double fd_laplacian(const F& f, const Vec<D>& p, double h = 1e-4) {
    double acc = -2.0 * D * f(p);
    for (int d = 0; d < D; ++d) {
        Vec<D> q = p;
        q[d] = p[d] + h;
        acc += f(q);
        q[d] = p[d] - h;
        acc += f(q);
    }
    return acc / (h * h);
}

}  // namespace

TEST_CASE("catalog bookkeeping: names, dimensions, rejection of unknowns") {
    const auto names = catalog_names();
    REQUIRE(names.size() == 7);
    for (const auto& name : names) {
        const int d = catalog_dimension(name);
        CHECK((d == 2 || d == 3));
        if (d == 2)
            CHECK_NOTHROW(catalog_2d(name));
        else
            CHECK_NOTHROW(catalog_3d(name));
    }
    CHECK(catalog_dimension("cos3d") == 3);
    CHECK_THROWS_AS(catalog_dimension("no-such-problem"), std::invalid_argument);
    CHECK_THROWS_AS(catalog_2d("cos3d"), std::invalid_argument);
    CHECK_THROWS_AS(catalog_3d("planar-cos"), std::invalid_argument);
}

TEST_CASE("planar-cos right-hand side matches the closed formula") {
    const auto e = make_planar_cos();
    const Vec<2> s{0.31, -0.47};
    for (double z : {0.0, 0.6, -1.3}) {
        const double want = std::cos(M_PI * s[0] * s[1]) / (1.0 + z * z);
        CHECK(e.problem.f(s, z) == Catch::Approx(want).epsilon(1e-14));
    }
    // dfdz against a symmetric difference
    const double h = 1e-6, z0 = 0.37;
    const double fd = (e.problem.f(s, z0 + h) - e.problem.f(s, z0 - h)) / (2.0 * h);
    CHECK(e.problem.dfdz(s, z0) == Catch::Approx(fd).margin(1e-8));
    CHECK(e.problem.map.name == "quadratic a=0.95");
    CHECK_FALSE(e.truth_ball);
    CHECK(e.reference_degree == 25);
}

TEST_CASE("fisher entries: logistic reaction term and large constant start") {
    const auto e = make_fisher_disk();
    const Vec<2> s{0.1, 0.2};
    CHECK(e.problem.f(s, 0.0) == 0.0);
    CHECK(e.problem.f(s, 1.0) == 0.0);
    CHECK(e.problem.f(s, 10.0) == Catch::Approx(-9000.0));
    CHECK(e.problem.dfdz(s, 0.0) == Catch::Approx(100.0));
    CHECK(e.defaults.guess == SolveConfig::GuessKind::constant);
    CHECK(e.defaults.guess_value == 10.0);
    CHECK(e.defaults.n_end == 25);

    const auto q = make_fisher_quadratic();
    CHECK(q.problem.map.name == "quadratic a=0.95");
    CHECK(q.problem.f(s, 10.0) == Catch::Approx(-9000.0));
}

TEST_CASE("manufactured-disk: f equals minus the Laplacian of the stated solution") {
    const auto e = make_manufactured_disk();
    REQUIRE(e.truth_ball);
    for (const Vec<2>& p : oracle::interior_points_2d(12, 0.8)) {
        const double want = -fd_laplacian<2>(e.truth_ball, p);
        CHECK(e.problem.f(p, 0.0) == Catch::Approx(want).margin(5e-6));
        CHECK(e.problem.dfdz(p, 0.4) == 0.0);  // z-free: the problem is linear
    }
    // the stated solution really has zero boundary trace
    CHECK(std::abs(e.truth_ball(Vec<2>{std::cos(0.7), std::sin(0.7)})) < 1e-14);
}

TEST_CASE("manufactured-quadratic: symbolic composition with the inverse map is exact") {
    const auto e = make_manufactured_quadratic();
    REQUIRE(e.truth_ball);
    REQUIRE(e.problem.map.has_inverse());

    // physical truth = ball truth through the inverse map
    const auto physical_truth = [&](const Vec<2>& s) {
        return e.truth_ball(e.problem.map.inverse(s));
    };
    for (const Vec<2>& x : oracle::interior_points_2d(12, 0.8)) {
        const Vec<2> s = e.problem.map.phi(x);
        const double want = -fd_laplacian<2>(physical_truth, s);
        CHECK(e.problem.f(s, 0.0) == Catch::Approx(want).epsilon(2e-6).margin(2e-6));
    }
    // ball-side truth takes its boundary values from the bubble factor
    CHECK(std::abs(e.truth_ball(Vec<2>{0.6, 0.8})) < 1e-14);
}

TEST_CASE("neumann-ellipse: manufactured data, zero normal derivative, gamma = 1") {
    const auto e = make_neumann_ellipse();
    REQUIRE(e.truth_ball);
    REQUIRE(e.problem.gamma);
    CHECK(e.problem.gamma(Vec<2>{0.3, -0.2}) == 1.0);
    CHECK(e.problem.bc.kind == BoundaryCondition<2>::Kind::neumann_zero);

    const auto physical_truth = [&](const Vec<2>& s) {
        return e.truth_ball(e.problem.map.inverse(s));
    };
    // f(s, u*(s)) = -lap u* + u* pointwise
    for (const Vec<2>& x : oracle::interior_points_2d(10, 0.75)) {
        const Vec<2> s = e.problem.map.phi(x);
        const double ustar = physical_truth(s);
        const double want = -fd_laplacian<2>(physical_truth, s) + ustar;
        CHECK(e.problem.f(s, ustar) == Catch::Approx(want).epsilon(2e-6).margin(2e-6));
    }
    // whole gradient of u* vanishes on the boundary (squared bubble)
    for (double theta : {0.0, 0.9, 2.2, 4.0, 5.6}) {
        const Vec<2> s = e.problem.map.phi(Vec<2>{std::cos(theta), std::sin(theta)});
        const Vec<2> g = oracle::fd_gradient<2>(physical_truth, s, 1e-5);
        CHECK(g.norm() < 1e-8);
    }
}

TEST_CASE("cos3d: right-hand side is the ball-coordinate cosine through the inverse map") {
    const auto e = make_cos3d();
    REQUIRE(e.problem.map.has_inverse());
    for (const Vec<3>& x : oracle::interior_points_3d(12, 0.8)) {
        const Vec<3> s = e.problem.map.phi(x);
        for (double z : {0.0, 0.8}) {
            const double want = std::cos(6.0 * x[0] + x[1] + x[2]) / (1.0 + z * z);
            CHECK(e.problem.f(s, z) == Catch::Approx(want).epsilon(1e-12).margin(1e-12));
        }
    }
    CHECK(e.defaults.n_end == 8);
}

TEST_CASE("manufactured-disk solves to near machine accuracy by degree 10") {
    const auto e = make_manufactured_disk();
    SolveConfig cfg = e.defaults;
    cfg.n_end = 10;
    const auto run = continue_in_degree(e.problem, cfg);
    REQUIRE(run.ok);
    const auto grid = reference_grid<2>();
    const double err_first = max_error_vs(run.solutions.front(), e.truth_ball, grid);
    const double err_last = max_error_vs(run.solutions.back(), e.truth_ball, grid);
    CHECK(err_last < 1e-8);
    CHECK(err_last < 1e-4 * err_first);
    for (const auto& sol : run.solutions) CHECK(sol.newton_iterations <= 1);  // linear problem
}

TEST_CASE("neumann-ellipse converges toward the known solution at modest degree") {
    const auto e = make_neumann_ellipse();
    SolveConfig cfg = e.defaults;
    cfg.n_end = 10;
    const auto run = continue_in_degree(e.problem, cfg);
    REQUIRE(run.ok);
    const auto grid = reference_grid<2>();
    const double err4 = max_error_vs(run.solutions[3], e.truth_ball, grid);
    const double err10 = max_error_vs(run.solutions.back(), e.truth_ball, grid);
    CHECK(err10 < 0.05);
    CHECK(err10 < err4);
}
