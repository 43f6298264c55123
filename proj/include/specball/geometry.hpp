#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "types.hpp"

namespace specball {

/* Smooth map Phi from the closed unit ball onto the physical domain, with
 * Jacobian and (when available) the inverse map.  The inverse is only needed
 * to evaluate solutions at physical points, never for assembly. */
template <int D>
struct DomainMap {
    std::string name;  // human-oriented descriptor, e.g. "quadratic a=0.95"
    std::string spec;  // machine round-trippable: "quadratic2d 0.95..." ("" = custom map)
    std::function<Vec<D>(const Vec<D>&)> phi;
    std::function<Mat<D>(const Vec<D>&)> jacobian;
    std::function<Vec<D>(const Vec<D>&)> inverse;  // may be empty

    bool has_inverse() const { return static_cast<bool>(inverse); }
};

namespace detail {
/* full-precision decimal so a reparsed spec rebuilds the same map bit for bit */
inline std::string full_precision(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

template <int D>
inline DomainMap<D> identity_map() {
    DomainMap<D> m;
    m.name = "identity";
    m.spec = "identity";
    m.phi = [](const Vec<D>& x) { return x; };
    m.jacobian = [](const Vec<D>&) { return Mat<D>::Identity(); };
    m.inverse = [](const Vec<D>& s) { return s; };
    return m;
}

/* (x, y) -> (a x, b y); maps the disk onto the axis-aligned ellipse. */
inline DomainMap<2> ellipse_map(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("ellipse_map: semi-axes must be > 0");
    DomainMap<2> m;
    std::ostringstream name;
    name << "ellipse a=" << a << " b=" << b;
    m.name = name.str();
    m.spec = "ellipse " + detail::full_precision(a) + " " + detail::full_precision(b);
    m.phi = [a, b](const Vec<2>& x) { return Vec<2>(a * x[0], b * x[1]); };
    m.jacobian = [a, b](const Vec<2>&) {
        Mat<2> J;
        J << a, 0.0, 0.0, b;
        return J;
    };
    m.inverse = [a, b](const Vec<2>& s) { return Vec<2>(s[0] / a, s[1] / b); };
    return m;
}

/* (x, y) -> (x - y + a x^2, x + y): a one-parameter family of smooth
 * non-convex perturbations of the disk (0 <= a < 1 keeps det J > 0).
 * det J = 2 + 2 a x; the inverse solves the quadratic in x directly. */
inline DomainMap<2> quadratic_map_2d(double a) {
    DomainMap<2> m;
    std::ostringstream name;
    name << "quadratic a=" << a;
    m.name = name.str();
    m.spec = "quadratic2d " + detail::full_precision(a);
    m.phi = [a](const Vec<2>& x) {
        return Vec<2>(x[0] - x[1] + a * x[0] * x[0], x[0] + x[1]);
    };
    m.jacobian = [a](const Vec<2>& x) {
        Mat<2> J;
        J << 1.0 + 2.0 * a * x[0], -1.0, 1.0, 1.0;
        return J;
    };
    if (a != 0.0) {
        m.inverse = [a](const Vec<2>& s) {
            const double x = (-1.0 + std::sqrt(1.0 + a * (s[0] + s[1]))) / a;
            return Vec<2>(x, s[1] - x);
        };
    } else {
        m.inverse = [](const Vec<2>& s) { return Vec<2>(0.5 * (s[0] + s[1]), 0.5 * (s[1] - s[0])); };
    }
    return m;
}

/* 3D analogue: (x, y, z) -> (x - y + a x^2, x + y, 2 z + b z^2),
 * det J = (2 + 2 a x)(2 + 2 b z). */
inline DomainMap<3> quadratic_map_3d(double a, double b) {
    DomainMap<3> m;
    std::ostringstream name;
    name << "quadratic3d a=" << a << " b=" << b;
    m.name = name.str();
    m.spec = "quadratic3d " + detail::full_precision(a) + " " + detail::full_precision(b);
    m.phi = [a, b](const Vec<3>& x) {
        return Vec<3>(x[0] - x[1] + a * x[0] * x[0], x[0] + x[1], 2.0 * x[2] + b * x[2] * x[2]);
    };
    m.jacobian = [a, b](const Vec<3>& x) {
        Mat<3> J = Mat<3>::Zero();
        J(0, 0) = 1.0 + 2.0 * a * x[0];
        J(0, 1) = -1.0;
        J(1, 0) = 1.0;
        J(1, 1) = 1.0;
        J(2, 2) = 2.0 + 2.0 * b * x[2];
        return J;
    };
    m.inverse = [a, b](const Vec<3>& s) {
        const double x = (a != 0.0) ? (-1.0 + std::sqrt(1.0 + a * (s[0] + s[1]))) / a
                                    : 0.5 * (s[0] + s[1]);
        const double z = (b != 0.0) ? (-1.0 + std::sqrt(1.0 + b * s[2])) / b : 0.5 * s[2];
        return Vec<3>(x, s[1] - x, z);
    };
    return m;
}

/* Rebuilds a map from its spec string ("identity", "ellipse A B",
 * "quadratic2d A", "quadratic3d A B").  Used by config files and by the
 * solution reader; custom maps (empty spec) cannot pass through here. */
template <int D>
DomainMap<D> map_from_spec(const std::string& spec) {
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    auto take = [&](double& v) {
        if (!(in >> v)) throw std::invalid_argument("map spec '" + spec + "': missing parameter");
    };
    auto done = [&] {
        std::string extra;
        if (in >> extra) throw std::invalid_argument("map spec '" + spec + "': trailing input");
    };
    if (kind == "identity") {
        done();
        return identity_map<D>();
    }
    if constexpr (D == 2) {
        if (kind == "ellipse") {
            double a, b;
            take(a), take(b), done();
            return ellipse_map(a, b);
        }
        if (kind == "quadratic2d") {
            double a;
            take(a), done();
            return quadratic_map_2d(a);
        }
    } else {
        if (kind == "quadratic3d") {
            double a, b;
            take(a), take(b), done();
            return quadratic_map_3d(a, b);
        }
    }
    throw std::invalid_argument("unknown " + std::to_string(D) + "D map spec '" + spec + "'");
}

/* Everything the Galerkin assembly needs, already transplanted to the unit
 * ball: for -div(A grad u) + gamma u = f(s, u) on Omega = Phi(B), the weak
 * form over B uses
 *   A~     = J^{-1} A(Phi) J^{-T}        (times det J inside the integral)
 *   gamma~ = det J * gamma(Phi)
 *   f~     = det J * f(Phi, z).
 * a_scaled already contains the det J factor: a_scaled = det J * A~. */
template <int D>
struct PulledBackCoefficients {
    std::function<Mat<D>(const Vec<D>&)> a_scaled;
    std::function<double(const Vec<D>&)> gamma_scaled;
    PointwiseNonlinearity<D> f_scaled;
    PointwiseNonlinearity<D> dfdz_scaled;
    std::function<double(const Vec<D>&)> det_jacobian;
};

namespace detail {
template <int D>
[[noreturn]] inline void throw_singular(const Vec<D>& x, double det) {
    std::ostringstream os;
    os << "pull_back: Jacobian determinant " << det << " is not positive at ball point (";
    for (int i = 0; i < D; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    throw std::domain_error(os.str());
}
}  // namespace detail

/* Builds the pulled-back coefficient bundle.  a may be empty (identity
 * diffusion), gamma may be empty (zero).  Every closure checks det J > 0 at
 * its evaluation point and reports the offending point otherwise. */
template <int D>
PulledBackCoefficients<D> pull_back(const DomainMap<D>& map, MatrixField<D> a,
                                    ScalarField<D> gamma, PointwiseNonlinearity<D> f,
                                    PointwiseNonlinearity<D> dfdz) {
    if (!map.phi || !map.jacobian)
        throw std::invalid_argument("pull_back: map must provide phi and jacobian");
    if (!f || !dfdz) throw std::invalid_argument("pull_back: f and df/dz are required");

    auto phi = map.phi;
    auto jac = map.jacobian;
    auto checked_det = [jac](const Vec<D>& x) {
        const Mat<D> J = jac(x);
        const double det = J.determinant();
        if (!(det > 0.0) || !std::isfinite(det)) detail::throw_singular<D>(x, det);
        return det;
    };

    PulledBackCoefficients<D> pb;
    pb.det_jacobian = checked_det;
    pb.a_scaled = [phi, jac, a, checked_det](const Vec<D>& x) -> Mat<D> {
        const Mat<D> J = jac(x);
        const double det = checked_det(x);
        const Mat<D> Jinv = J.inverse();
        const Mat<D> phys = a ? a(phi(x)) : Mat<D>::Identity();
        return det * (Jinv * phys * Jinv.transpose());
    };
    pb.gamma_scaled = [phi, gamma, checked_det](const Vec<D>& x) {
        return gamma ? checked_det(x) * gamma(phi(x)) : 0.0;
    };
    pb.f_scaled = [phi, f, checked_det](const Vec<D>& x, double z) {
        return checked_det(x) * f(phi(x), z);
    };
    pb.dfdz_scaled = [phi, dfdz, checked_det](const Vec<D>& x, double z) {
        return checked_det(x) * dfdz(phi(x), z);
    };
    return pb;
}

}  // namespace specball
