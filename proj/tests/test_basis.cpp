#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <specball/basis.hpp>
#include <specball/multi_index.hpp>
#include <specball/orthopoly.hpp>
#include <specball/quadrature.hpp>

#include "oracle_helpers.hpp"

using namespace specball;
using Catch::Approx;

TEST_CASE("multi-index order sizes and prefix nesting") {
    CHECK(poly_space_dim(2, 0) == 1);
    CHECK(poly_space_dim(2, 3) == 10);
    CHECK(poly_space_dim(2, 25) == 351);
    CHECK(poly_space_dim(3, 0) == 1);
    CHECK(poly_space_dim(3, 3) == 20);
    CHECK(poly_space_dim(3, 8) == 165);

    const auto small2 = MultiIndexOrder::disk(5);
    const auto big2 = MultiIndexOrder::disk(6);
    REQUIRE(small2.size() == poly_space_dim(2, 5));
    for (int i = 0; i < small2.size(); ++i) CHECK(small2[i] == big2[i]);

    const auto small3 = MultiIndexOrder::ball(4);
    const auto big3 = MultiIndexOrder::ball(5);
    REQUIRE(small3.size() == poly_space_dim(3, 4));
    for (int i = 0; i < small3.size(); ++i) CHECK(small3[i] == big3[i]);

    for (const auto& e : big2.entries()) {
        CHECK(e.j == 0);
        CHECK(e.k >= 0);
        CHECK(e.k <= e.m);
    }
    for (const auto& e : big3.entries()) {
        CHECK(e.j >= 0);
        CHECK(e.k >= 0);
        CHECK(e.j + e.k <= e.m);
    }
}

TEST_CASE("Chebyshev U: endpoint identities and trig oracle") {
    /* U_n(1) = n+1, U_n'(1) = n(n+1)(n+2)/3 */
    const ValueDeriv u5 = chebyshev_u(5, 1.0);
    CHECK(u5.value == 6.0);
    CHECK(u5.deriv == 70.0);
    const ValueDeriv u9 = chebyshev_u(9, 1.0);
    CHECK(u9.value == 10.0);
    CHECK(u9.deriv == 330.0);

    for (int m = 0; m <= 20; ++m)
        for (double t = -0.95; t <= 0.96; t += 0.1301) {
            const ValueDeriv got = chebyshev_u(m, t);
            CHECK(got.value == Approx(oracle::chebyshev_u_trig(m, t)).margin(1e-10));
            const double fd = (oracle::chebyshev_u_trig(m, t + 1e-6) -
                               oracle::chebyshev_u_trig(m, t - 1e-6)) /
                              2e-6;
            CHECK(got.deriv == Approx(fd).margin(1e-4 * (1.0 + std::abs(fd))));
        }
}

TEST_CASE("Gegenbauer recurrence against the explicit series") {
    for (double lambda : {0.5, 1.5, 2.5, 3.0})
        for (int m = 0; m <= 12; ++m)
            for (double t = -1.0; t <= 1.001; t += 0.2) {
                const double got = gegenbauer_value(m, lambda, t);
                const double want = oracle::gegenbauer_series(m, lambda, t);
                INFO("lambda=" << lambda << " m=" << m << " t=" << t);
                CHECK(got == Approx(want).margin(1e-8 * (1.0 + std::abs(want))));
            }

    /* lambda = 1 reduces to Chebyshev U */
    for (int m = 0; m <= 15; ++m)
        for (double t = -0.9; t <= 0.91; t += 0.3)
            CHECK(gegenbauer_value(m, 1.0, t) == Approx(chebyshev_u(m, t).value).epsilon(1e-12));

    /* derivative identity vs finite differences */
    for (double lambda : {0.5, 2.0})
        for (int m = 1; m <= 10; ++m)
            for (double t = -0.8; t <= 0.81; t += 0.4) {
                const double fd =
                    (gegenbauer_value(m, lambda, t + 1e-6) - gegenbauer_value(m, lambda, t - 1e-6)) /
                    2e-6;
                CHECK(gegenbauer(m, lambda, t).deriv == Approx(fd).margin(1e-4 * (1.0 + std::abs(fd))));
            }
}

TEST_CASE("weighted Gegenbauer equals s^(m/2) C(y/sqrt(s)) and is finite at s=0") {
    for (double lambda : {0.5, 1.0, 2.0})
        for (int m = 0; m <= 9; ++m) {
            for (double s : {1.0, 0.64, 0.2})
                for (double y = -0.4; y <= 0.41; y += 0.2) {
                    const double direct =
                        std::pow(s, m / 2.0) * gegenbauer_value(m, lambda, y / std::sqrt(s));
                    const double got = weighted_gegenbauer(m, lambda, y, s).value;
                    CHECK(got == Approx(direct).margin(1e-12 * (1.0 + std::abs(direct))));
                }

            /* s = 0: only the top Gegenbauer coefficient survives,
             * W_m(y, 0) = (2y)^m Gamma(m+lambda) / (Gamma(lambda) m!) */
            const double y = 0.37;
            const double lead = std::exp(std::lgamma(m + lambda) - std::lgamma(lambda) -
                                         std::lgamma(m + 1.0));
            const double want = std::pow(2.0 * y, m) * lead;
            CHECK(weighted_gegenbauer(m, lambda, y, 0.0).value ==
                  Approx(want).margin(1e-12 * (1.0 + std::abs(want))));
        }

    /* partial derivatives vs finite differences, including near s=0 */
    for (double lambda : {1.0, 1.5})
        for (int m = 1; m <= 8; ++m)
            for (double s : {0.9, 0.3, 0.01})
                for (double y : {-0.3, 0.12}) {
                    const WeightedGegenbauer w = weighted_gegenbauer(m, lambda, y, s);
                    const double fdy = (weighted_gegenbauer(m, lambda, y + 1e-6, s).value -
                                        weighted_gegenbauer(m, lambda, y - 1e-6, s).value) /
                                       2e-6;
                    const double fds = (weighted_gegenbauer(m, lambda, y, s + 1e-6).value -
                                        weighted_gegenbauer(m, lambda, y, s - 1e-6).value) /
                                       2e-6;
                    CHECK(w.dy == Approx(fdy).margin(1e-5 * (1.0 + std::abs(fdy))));
                    CHECK(w.ds == Approx(fds).margin(1e-5 * (1.0 + std::abs(fds))));
                }
}

TEST_CASE("disk basis: closed forms in the first two blocks") {
    const auto basis = BasisSet<2>::plain_basis(2);
    const double isp = 1.0 / std::sqrt(std::numbers::pi);
    for (const Vec<2>& p : oracle::interior_points_2d(7)) {
        VectorXd vals(basis.size());
        basis.eval(p, vals.data());
        CHECK(vals(0) == Approx(isp).epsilon(1e-15));            // constant
        CHECK(vals(1) == Approx(2.0 * p[0] * isp).margin(1e-15)); // ridge along x
        CHECK(vals(2) == Approx(2.0 * p[1] * isp).margin(1e-15)); // ridge along y
    }
}

TEST_CASE("disk basis is orthonormal under the disk rule") {
    const int n = 6;
    const auto basis = BasisSet<2>::plain_basis(n);
    const QuadratureRule<2> rule = disk_rule(n + 1);  // exact through 2n+2
    MatrixXd gram = MatrixXd::Zero(basis.size(), basis.size());
    VectorXd vals(basis.size());
    for (int q = 0; q < rule.size(); ++q) {
        basis.eval(rule.nodes[q], vals.data());
        gram.noalias() += rule.weights[q] * vals * vals.transpose();
    }
    const double err = (gram - MatrixXd::Identity(basis.size(), basis.size()))
                           .cwiseAbs()
                           .maxCoeff();
    CHECK(err < 1e-12);
}

TEST_CASE("ball basis: normalized constant and orthonormality") {
    const auto basis = BasisSet<3>::plain_basis(4);
    VectorXd vals(basis.size());
    basis.eval(Vec<3>(0.2, -0.1, 0.4), vals.data());
    CHECK(vals(0) == Approx(std::sqrt(3.0 / (4.0 * std::numbers::pi))).epsilon(1e-13));

    const QuadratureRule<3> rule = ball_rule(5);  // exact through degree 9 >= 8
    MatrixXd gram = MatrixXd::Zero(basis.size(), basis.size());
    for (int q = 0; q < rule.size(); ++q) {
        basis.eval(rule.nodes[q], vals.data());
        gram.noalias() += rule.weights[q] * vals * vals.transpose();
    }
    const double err = (gram - MatrixXd::Identity(basis.size(), basis.size()))
                           .cwiseAbs()
                           .maxCoeff();
    CHECK(err < 1e-12);
}

TEST_CASE("lower-degree basis evaluations are bitwise prefixes of higher-degree ones") {
    {
        const auto small = BasisSet<2>::plain_basis(4);
        const auto big = BasisSet<2>::plain_basis(7);
        VectorXd vs(small.size()), vb(big.size());
        std::vector<Vec<2>> gs(small.size()), gb(big.size());
        for (const Vec<2>& p : oracle::interior_points_2d(11, 1.0)) {
            small.eval(p, vs.data(), gs.data());
            big.eval(p, vb.data(), gb.data());
            for (int i = 0; i < small.size(); ++i) {
                REQUIRE(vs(i) == vb(i));  // exact equality, not approximate
                REQUIRE(gs[i] == gb[i]);
            }
        }
    }
    {
        const auto small = BasisSet<3>::plain_basis(3);
        const auto big = BasisSet<3>::plain_basis(6);
        VectorXd vs(small.size()), vb(big.size());
        std::vector<Vec<3>> gs(small.size()), gb(big.size());
        for (const Vec<3>& p : oracle::interior_points_3d(11, 1.0)) {
            small.eval(p, vs.data(), gs.data());
            big.eval(p, vb.data(), gb.data());
            for (int i = 0; i < small.size(); ++i) {
                REQUIRE(vs(i) == vb(i));
                REQUIRE(gs[i] == gb[i]);
            }
        }
    }
}

TEST_CASE("gradients match central differences") {
    {
        const auto plain = BasisSet<2>::plain_basis(5);
        const auto bubble = BasisSet<2>::bubble_basis(5);
        for (const auto* basis : {&plain, &bubble}) {
            VectorXd vals(basis->size());
            std::vector<Vec<2>> grads(basis->size());
            for (const Vec<2>& p : oracle::interior_points_2d(9)) {
                basis->eval(p, vals.data(), grads.data());
                for (int i = 0; i < basis->size(); ++i) {
                    const Vec<2> fd = oracle::fd_gradient<2>(
                        [&](const Vec<2>& q) {
                            VectorXd v(basis->size());
                            basis->eval(q, v.data());
                            return v(i);
                        },
                        p);
                    CHECK((grads[i] - fd).norm() < 1e-5 * (1.0 + fd.norm()));
                }
            }
        }
    }
    {
        const auto plain = BasisSet<3>::plain_basis(4);
        const auto bubble = BasisSet<3>::bubble_basis(4);
        for (const auto* basis : {&plain, &bubble}) {
            VectorXd vals(basis->size());
            std::vector<Vec<3>> grads(basis->size());
            for (const Vec<3>& p : oracle::interior_points_3d(9)) {
                basis->eval(p, vals.data(), grads.data());
                for (int i = 0; i < basis->size(); ++i) {
                    const Vec<3> fd = oracle::fd_gradient<3>(
                        [&](const Vec<3>& q) {
                            VectorXd v(basis->size());
                            basis->eval(q, v.data());
                            return v(i);
                        },
                        p);
                    CHECK((grads[i] - fd).norm() < 1e-5 * (1.0 + fd.norm()));
                }
            }
        }
    }
}

TEST_CASE("bubble basis vanishes on the boundary and 3D eval is finite there") {
    const auto b2 = BasisSet<2>::bubble_basis(6);
    VectorXd v2(b2.size());
    for (int i = 0; i < 40; ++i) {
        const double th = 2.0 * std::numbers::pi * i / 40.0;
        b2.eval(Vec<2>(std::cos(th), std::sin(th)), v2.data());
        CHECK(v2.cwiseAbs().maxCoeff() < 1e-13);
    }

    const auto p3 = BasisSet<3>::plain_basis(5);
    const auto b3 = BasisSet<3>::bubble_basis(5);
    VectorXd v3(p3.size());
    std::vector<Vec<3>> g3(p3.size());
    for (int i = 0; i < 30; ++i) {
        const double th = 2.0 * std::numbers::pi * i / 30.0;
        const double c = -1.0 + 2.0 * (i + 0.5) / 30.0;
        const double s = std::sqrt(1.0 - c * c);
        const Vec<3> p(s * std::cos(th), s * std::sin(th), c);
        p3.eval(p, v3.data(), g3.data());
        CHECK(v3.allFinite());
        for (const auto& g : g3) CHECK(g.allFinite());
        b3.eval(p, v3.data());
        CHECK(v3.cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("expansion_value pads shorter coefficient vectors") {
    const auto basis = BasisSet<2>::plain_basis(3);
    VectorXd alpha = VectorXd::Zero(3);
    alpha << 1.0, 0.5, -2.0;
    const Vec<2> p(0.3, -0.2);
    VectorXd full(basis.size());
    basis.eval(p, full.data());
    const double want = full(0) * 1.0 + full(1) * 0.5 + full(2) * -2.0;
    CHECK(basis.expansion_value(alpha, p) == Approx(want).epsilon(1e-15));

    VectorXd too_long = VectorXd::Zero(basis.size() + 1);
    CHECK_THROWS_AS(basis.expansion_value(too_long, p), std::invalid_argument);
}
