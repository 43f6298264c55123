#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "multi_index.hpp"
#include "orthopoly.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace specball {

/* Orthonormal polynomial basis on the unit disk (D=2) or ball (D=3), blocks
 * ordered by degree as in MultiIndexOrder.
 *
 * D=2: ridge polynomials U_m(x cos(kh) + y sin(kh)) / sqrt(pi), h = pi/(m+1)
 *      block-local, k = 0..m.
 * D=3: Gegenbauer products
 *      C^{j+k+3/2}_{m-j-k}(x) * W^{k+1}_j(y, 1-x^2) * W^{1/2}_k(z, 1-x^2-y^2)
 *      normalized to unit L2 norm; the W factors are the cancelled
 *      polynomial form of (1-x^2)^{j/2} C_j(y/sqrt(1-x^2)) etc., so values
 *      and gradients are finite on the whole closed ball.
 *
 * The "bubble" kind multiplies every function by 1 - |x|^2, spanning the
 * polynomial subspace with zero boundary trace (the gradient picks up the
 * product-rule term).  Normalization constants for D=3 are computed once per
 * degree block with a block-local quadrature rule, so the basis of degree
 * n-1 is bit-for-bit the prefix of the basis of degree n. */
template <int D>
class BasisSet {
    static_assert(D == 2 || D == 3, "BasisSet supports D = 2 and 3");

  public:
    enum class Kind { plain, bubble };

    static BasisSet plain_basis(int degree) { return BasisSet(degree, Kind::plain); }
    static BasisSet bubble_basis(int degree) { return BasisSet(degree, Kind::bubble); }

    int degree() const { return order_.degree(); }
    int size() const { return order_.size(); }
    Kind kind() const { return kind_; }
    const MultiIndexOrder& order() const { return order_; }

    /* Writes all basis values at x into values[0..size), and, when grads is
     * non-null, the gradients alongside.  Output order follows order(). */
    void eval(const Vec<D>& x, double* values, Vec<D>* grads = nullptr) const {
        eval_plain(x, values, grads);
        if (kind_ == Kind::bubble) {
            const double b = 1.0 - x.squaredNorm();
            for (int i = 0; i < size(); ++i) {
                if (grads) grads[i] = b * grads[i] - 2.0 * values[i] * x;
                values[i] *= b;
            }
        }
    }

    VectorXd values_at(const Vec<D>& x) const {
        VectorXd v(size());
        eval(x, v.data());
        return v;
    }

    /* Value of the expansion sum_i alpha_i psi_i(x); alpha may be shorter
     * than size() (treated as zero-padded), which is safe because lower
     * degrees are prefixes. */
    double expansion_value(const VectorXd& alpha, const Vec<D>& x) const {
        if (alpha.size() > size())
            throw std::invalid_argument("expansion_value: coefficient vector longer than basis");
        VectorXd v(size());
        eval(x, v.data());
        return v.head(alpha.size()).dot(alpha);
    }

  private:
    BasisSet(int degree, Kind kind)
        : order_(D == 2 ? MultiIndexOrder::disk(degree) : MultiIndexOrder::ball(degree)),
          kind_(kind) {
        if constexpr (D == 3) compute_norms();
    }

    void eval_plain(const Vec<2>& x, double* values, Vec<2>* grads) const
        requires(D == 2)
    {
        const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
        int idx = 0;
        for (int m = 0; m <= degree(); ++m) {
            const double h = std::numbers::pi / (m + 1);
            for (int k = 0; k <= m; ++k, ++idx) {
                const double c = std::cos(k * h), s = std::sin(k * h);
                const ValueDeriv u = chebyshev_u(m, c * x[0] + s * x[1]);
                values[idx] = inv_sqrt_pi * u.value;
                if (grads) grads[idx] = inv_sqrt_pi * u.deriv * Vec<2>(c, s);
            }
        }
    }

    void eval_plain(const Vec<3>& p, double* values, Vec<3>* grads) const
        requires(D == 3)
    {
        const double x = p[0], y = p[1], z = p[2];
        const double s1 = 1.0 - x * x;           // argument of the middle factor
        const double s2 = 1.0 - x * x - y * y;   // argument of the inner factor
        const auto& entries = order_.entries();
        for (int idx = 0; idx < size(); ++idx) {
            const auto& e = entries[idx];
            const int i = e.m - e.j - e.k;
            const double lambda = e.j + e.k + 1.5;
            const double inv_h = 1.0 / norms_[idx];
            if (!grads) {
                const double cv = gegenbauer_value(i, lambda, x);
                const double wj = weighted_gegenbauer(e.j, e.k + 1.0, y, s1).value;
                const double wk = weighted_gegenbauer(e.k, 0.5, z, s2).value;
                values[idx] = inv_h * cv * wj * wk;
                continue;
            }
            const ValueDeriv c = gegenbauer(i, lambda, x);
            const WeightedGegenbauer wj = weighted_gegenbauer(e.j, e.k + 1.0, y, s1);
            const WeightedGegenbauer wk = weighted_gegenbauer(e.k, 0.5, z, s2);
            values[idx] = inv_h * c.value * wj.value * wk.value;
            /* chain rule: s1 depends on x; s2 on x and y */
            const double dx = c.deriv * wj.value * wk.value +
                              c.value * (wj.ds * wk.value + wj.value * wk.ds) * (-2.0 * x);
            const double dy =
                c.value * (wj.dy * wk.value + wj.value * wk.ds * (-2.0 * y));
            const double dz = c.value * wj.value * wk.dy;
            grads[idx] = inv_h * Vec<3>(dx, dy, dz);
        }
    }

    /* L2 normalization, one degree block at a time with the smallest rule
     * that is exact for the squared block (ball_rule(m+1) integrates degree
     * 2m+1).  Using the block-local rule keeps the constants independent of
     * the requested total degree. */
    void compute_norms()
        requires(D == 3)
    {
        norms_.assign(size(), 1.0);
        int idx = 0;
        for (int m = 0; m <= degree(); ++m) {
            const int block = poly_space_dim(2, m);  // labels with j + k <= m
            const QuadratureRule<3> rule = ball_rule(m + 1);
            std::vector<double> acc(block, 0.0);
            std::vector<double> raw(block);
            for (int q = 0; q < rule.size(); ++q) {
                const Vec<3>& p = rule.nodes[q];
                const double s1 = 1.0 - p[0] * p[0];
                const double s2 = s1 - p[1] * p[1];
                int b = 0;
                for (int j = 0; j <= m; ++j)
                    for (int k = 0; k + j <= m; ++k, ++b) {
                        const double cv = gegenbauer_value(m - j - k, j + k + 1.5, p[0]);
                        const double wj = weighted_gegenbauer(j, k + 1.0, p[1], s1).value;
                        const double wk = weighted_gegenbauer(k, 0.5, p[2], s2).value;
                        raw[b] = cv * wj * wk;
                    }
                for (int b = 0; b < block; ++b) acc[b] += rule.weights[q] * raw[b] * raw[b];
            }
            for (int b = 0; b < block; ++b, ++idx) norms_[idx] = std::sqrt(acc[b]);
        }
    }

    MultiIndexOrder order_;
    Kind kind_;
    std::vector<double> norms_;  // D=3 only
};

}  // namespace specball
