#pragma once

/* Univariate orthogonal-polynomial kernels used by the ball bases.  All of
 * them run the classical three-term recurrences forward; derivatives come
 * from differentiated recurrences (no divided differences anywhere). */

namespace specball {

struct ValueDeriv {
    double value = 0.0;
    double deriv = 0.0;
};

/* Chebyshev polynomial of the second kind U_n(t) with U_n'(t).
 *   U_{n+1} = 2 t U_n - U_{n-1},   U'_{n+1} = 2 U_n + 2 t U'_n - U'_{n-1}. */
inline ValueDeriv chebyshev_u(int n, double t) {
    double u0 = 1.0, d0 = 0.0;
    if (n <= 0) return {u0, d0};
    double u1 = 2.0 * t, d1 = 2.0;
    for (int i = 1; i < n; ++i) {
        const double u2 = 2.0 * t * u1 - u0;
        const double d2 = 2.0 * u1 + 2.0 * t * d1 - d0;
        u0 = u1;
        d0 = d1;
        u1 = u2;
        d1 = d2;
    }
    return {u1, d1};
}

/* Gegenbauer (ultraspherical) C_m^lambda(t):
 *   C_0 = 1,  C_1 = 2 lambda t,
 *   i C_i = 2 (i + lambda - 1) t C_{i-1} - (i + 2 lambda - 2) C_{i-2}. */
inline double gegenbauer_value(int m, double lambda, double t) {
    if (m <= 0) return 1.0;
    double c0 = 1.0, c1 = 2.0 * lambda * t;
    for (int i = 2; i <= m; ++i) {
        const double c2 =
            (2.0 * (i + lambda - 1.0) * t * c1 - (i + 2.0 * lambda - 2.0) * c0) / i;
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

/* d/dt C_m^lambda = 2 lambda C_{m-1}^{lambda+1}. */
inline ValueDeriv gegenbauer(int m, double lambda, double t) {
    const double v = gegenbauer_value(m, lambda, t);
    const double d = (m == 0) ? 0.0 : 2.0 * lambda * gegenbauer_value(m - 1, lambda + 1.0, t);
    return {v, d};
}

/* W_m(y, s) := s^{m/2} C_m^lambda(y / sqrt(s)), written in cancelled form so
 * it is a genuine bivariate polynomial, finite for every s including s = 0
 * (where the raw formula would divide by zero).  From the Gegenbauer
 * recurrence:
 *   m W_m = 2 (m + lambda - 1) y W_{m-1} - (m + 2 lambda - 2) s W_{m-2},
 * with W_0 = 1, W_1 = 2 lambda y.  The partials satisfy the recurrence
 * differentiated term by term, so value and gradient stay consistent to
 * machine precision. */
struct WeightedGegenbauer {
    double value = 0.0;
    double dy = 0.0;
    double ds = 0.0;
};

inline WeightedGegenbauer weighted_gegenbauer(int m, double lambda, double y, double s) {
    double w0 = 1.0, wy0 = 0.0, ws0 = 0.0;
    if (m <= 0) return {w0, wy0, ws0};
    double w1 = 2.0 * lambda * y, wy1 = 2.0 * lambda, ws1 = 0.0;
    for (int i = 2; i <= m; ++i) {
        const double a = 2.0 * (i + lambda - 1.0);
        const double b = i + 2.0 * lambda - 2.0;
        const double w2 = (a * y * w1 - b * s * w0) / i;
        const double wy2 = (a * (w1 + y * wy1) - b * s * wy0) / i;
        const double ws2 = (a * y * ws1 - b * (w0 + s * ws0)) / i;
        w0 = w1;
        wy0 = wy1;
        ws0 = ws1;
        w1 = w2;
        wy1 = wy2;
        ws1 = ws2;
    }
    return {w1, wy1, ws1};
}

}  // namespace specball
