#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace specball {

/* Nodes and weights on the closed unit disk/ball, exact for all polynomials
 * of total degree <= exactness. */
template <int D>
struct QuadratureRule {
    std::vector<Vec<D>> nodes;
    std::vector<double> weights;
    int exactness = 0;

    int size() const { return static_cast<int>(nodes.size()); }

    /* Plain left-to-right accumulation; the node order is deterministic, so
     * repeated calls are bit-identical. */
    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/* Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
 * Jacobi matrix, weights mu0 times the squared first components of the
 * normalized eigenvectors.  Eigen returns eigenvalues in ascending order. */
inline Rule1D golub_welsch(const std::vector<double>& diag, const std::vector<double>& sub,
                           double mu0) {
    const int n = static_cast<int>(diag.size());
    MatrixXd J = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) J(i, i) = diag[i];
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = sub[i];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("golub_welsch: eigensolver failed");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

/* Recurrence coefficients (monic form) for the Jacobi weight
 * (1-t)^a (1+t)^b on [-1,1]; alpha_k goes on the diagonal, sqrt(beta_k) on
 * the subdiagonal, and beta_0 = mu0 is the total mass of the weight. */
inline void jacobi_recurrence(double a, double b, int n, std::vector<double>& alpha,
                              std::vector<double>& beta) {
    alpha.resize(n);
    beta.resize(n);
    const double apb = a + b;
    beta[0] = std::pow(2.0, apb + 1.0) * std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                                  std::lgamma(apb + 2.0));
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            alpha[k] = (b - a) / (apb + 2.0);
        } else {
            const double den = (2.0 * k + apb) * (2.0 * k + apb + 2.0);
            alpha[k] = (b * b - a * a) / den;
            const double num = 4.0 * k * (k + a) * (k + b) * (k + apb);
            const double d2 = (2.0 * k + apb) * (2.0 * k + apb);
            beta[k] = num / (d2 * (2.0 * k + apb + 1.0) * (2.0 * k + apb - 1.0));
        }
    }
}

inline Rule1D gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one node");
    std::vector<double> alpha, beta;
    jacobi_recurrence(a, b, n, alpha, beta);
    std::vector<double> sub(n > 1 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(beta[k]);
    return golub_welsch(alpha, sub, beta[0]);
}

}  // namespace detail

/* count-point Gauss-Legendre rule on [lo, hi]; exact through degree
 * 2*count - 1. */
inline Rule1D gauss_legendre(int count, double lo, double hi) {
    Rule1D r = detail::gauss_jacobi(count, 0.0, 0.0);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < count; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

/* q-point Gauss rule for the weight (1+t)^2 on [-1,1] (Jacobi a=0, b=2);
 * total mass 8/3, exact through degree 2q - 1. */
inline Rule1D gauss_weighted_1plus_t_sq(int q) { return detail::gauss_jacobi(q, 0.0, 2.0); }

/* Product rule on the unit disk: (q+1)-point Gauss-Legendre in the radius on
 * [0,1] against 2q+1 equispaced angles, weight (2pi/(2q+1)) * omega_l * r_l.
 * Exact for polynomials of total degree <= 2q. */
inline QuadratureRule<2> disk_rule(int q) {
    if (q < 0) throw std::invalid_argument("disk_rule: q must be >= 0");
    const Rule1D radial = gauss_legendre(q + 1, 0.0, 1.0);
    const int na = 2 * q + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    QuadratureRule<2> rule;
    rule.exactness = 2 * q;
    rule.nodes.reserve(static_cast<std::size_t>(q + 1) * na);
    rule.weights.reserve(rule.nodes.capacity());
    for (int l = 0; l <= q; ++l) {
        const double r = radial.nodes[l];
        const double w = (two_pi / na) * radial.weights[l] * r;
        for (int m = 0; m < na; ++m) {
            const double th = two_pi * m / na;
            rule.nodes.push_back(Vec<2>(r * std::cos(th), r * std::sin(th)));
            rule.weights.push_back(w);
        }
    }
    return rule;
}

/* Product rule on the unit ball, 2q^3 points: radius from the q-point Gauss
 * rule for the weight (1+t)^2 mapped by r = (zeta+1)/2 (which absorbs the
 * r^2 volume factor), polar angle phi = arccos(xi_j) from q-point
 * Gauss-Legendre, azimuth theta_i = i*pi/q for i = 1..2q with the trapezoid
 * weight pi/q.  Exact for polynomials of total degree <= 2q - 1. */
inline QuadratureRule<3> ball_rule(int q) {
    if (q < 1) throw std::invalid_argument("ball_rule: q must be >= 1");
    const Rule1D radial = gauss_weighted_1plus_t_sq(q);
    const Rule1D polar = gauss_legendre(q, -1.0, 1.0);
    const double pi = std::numbers::pi;
    QuadratureRule<3> rule;
    rule.exactness = 2 * q - 1;
    rule.nodes.reserve(static_cast<std::size_t>(2 * q) * q * q);
    rule.weights.reserve(rule.nodes.capacity());
    for (int i = 1; i <= 2 * q; ++i) {
        const double theta = pi * i / q;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int j = 0; j < q; ++j) {
            const double cphi = polar.nodes[j];                 // cos(phi)
            const double sphi = std::sqrt(1.0 - cphi * cphi);   // sin(phi) >= 0
            for (int k = 0; k < q; ++k) {
                const double r = 0.5 * (radial.nodes[k] + 1.0);
                rule.nodes.push_back(Vec<3>(r * sphi * ct, r * sphi * st, r * cphi));
                rule.weights.push_back((pi / q) * polar.weights[j] * radial.weights[k] / 8.0);
            }
        }
    }
    return rule;
}

/* Dimension-dispatched rule on the unit disk/ball. */
template <int D>
inline QuadratureRule<D> volume_rule(int q) {
    if constexpr (D == 2)
        return disk_rule(q);
    else
        return ball_rule(q);
}

}  // namespace specball
