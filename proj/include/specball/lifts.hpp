#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "assembly.hpp"
#include "basis.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace specball {

/* Quadrature for integrals over the physical boundary Phi(unit sphere).
 * points live on the unit sphere; weights already contain the surface
 * Jacobian of Phi, so  integral_{dOmega} F ds ~= sum_i w_i F(Phi(p_i)). */
template <int D>
struct BoundaryRule {
    std::vector<Vec<D>> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/* 2D: `order` equispaced angles with the trapezoid rule (spectrally accurate
 * for the periodic integrand), arc element |J(p) t_hat|. */
inline BoundaryRule<2> boundary_rule(const DomainMap<2>& map, int order) {
    if (order < 4) throw std::invalid_argument("boundary_rule: order too small");
    BoundaryRule<2> br;
    br.points.reserve(order);
    br.weights.reserve(order);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < order; ++i) {
        const double t = two_pi * i / order;
        const Vec<2> p(std::cos(t), std::sin(t));
        const Vec<2> tangent(-p[1], p[0]);
        br.points.push_back(p);
        br.weights.push_back((two_pi / order) * (map.jacobian(p) * tangent).norm());
    }
    return br;
}

/* 3D: 2q trapezoid azimuths x q-point Gauss-Legendre in cos(phi).  With
 * unit tangents t_theta = (-sin th, cos th, 0) and t_phi = d p / d phi, the
 * surface element relative to d theta d(cos phi) is |J t_theta x J t_phi|. */
inline BoundaryRule<3> boundary_rule(const DomainMap<3>& map, int order) {
    if (order < 2) throw std::invalid_argument("boundary_rule: order too small");
    const int q = order;
    const Rule1D polar = gauss_legendre(q, -1.0, 1.0);
    BoundaryRule<3> br;
    br.points.reserve(2 * q * q);
    br.weights.reserve(2 * q * q);
    const double pi = std::numbers::pi;
    for (int i = 1; i <= 2 * q; ++i) {
        const double th = pi * i / q;
        const double ct = std::cos(th), st = std::sin(th);
        for (int j = 0; j < q; ++j) {
            const double c = polar.nodes[j];
            const double s = std::sqrt(1.0 - c * c);
            const Vec<3> p(s * ct, s * st, c);
            const Vec<3> t_theta(-st, ct, 0.0);
            const Vec<3> t_phi(c * ct, c * st, -s);
            const Mat<3> J = map.jacobian(p);
            const double element = (J * t_theta).cross(J * t_phi).norm();
            br.points.push_back(p);
            br.weights.push_back((pi / q) * polar.weights[j] * element);
        }
    }
    return br;
}

/* Shifts an inhomogeneous Dirichlet problem to a homogeneous one: with
 * u = v + G the new unknown v solves L v = f(s, v + G) - (L G)(s) with zero
 * trace.  The caller-supplied extension G and its image L G come from the
 * boundary condition. */
template <int D>
struct DirichletLift {
    Problem<D> shifted;                               // homogeneous problem for v
    ScalarField<D> shift_physical;                    // G(s)
    std::function<double(const Vec<D>&)> shift_ball;  // G(Phi(x))
};

template <int D>
DirichletLift<D> lift_dirichlet(const Problem<D>& p) {
    if (p.bc.kind != BoundaryCondition<D>::Kind::dirichlet)
        throw std::invalid_argument("lift_dirichlet: problem has no inhomogeneous Dirichlet data");
    if (!p.bc.lift || !p.bc.lift_Lg)
        throw std::invalid_argument(
            "lift_dirichlet: boundary condition must carry the extension G and L G");

    DirichletLift<D> out;
    out.shift_physical = p.bc.lift;
    auto G = p.bc.lift;
    auto LG = p.bc.lift_Lg;
    auto f = p.f;
    auto dfdz = p.dfdz;

    out.shifted = p;
    out.shifted.f = [f, G, LG](const Vec<D>& s, double z) { return f(s, z + G(s)) - LG(s); };
    out.shifted.dfdz = [dfdz, G](const Vec<D>& s, double z) { return dfdz(s, z + G(s)); };
    out.shifted.bc = BoundaryCondition<D>{};  // dirichlet_zero
    auto phi = p.map.phi;
    out.shift_ball = [G, phi](const Vec<D>& x) { return G(phi(x)); };
    return out;
}

/* Inhomogeneous Neumann data is removed with an auxiliary linear solve:
 * v* satisfies -lap v* = c0 in Omega with normal derivative g and zero mean,
 * where c0 = -(boundary flux)/(volume) makes the pair compatible.  Then
 * u = w + v* where w solves the homogeneous-Neumann problem with right-hand
 * side f(s, z + v*) - gamma v* - c0.  Only identity diffusion is supported
 * (the auxiliary problem is a Laplace problem).  v* is computed once in the
 * plain basis of degree aux_degree and reused for every continuation step. */
template <int D>
struct NeumannLift {
    double c0 = 0.0;
    double flux = 0.0;    // integral of g over the physical boundary
    double volume = 0.0;  // |Omega|
    std::shared_ptr<BasisSet<D>> aux_basis;
    VectorXd coefficients;
    double aux_residual_inf = 0.0;  // linear-solve residual of the bordered system
    double aux_mean = 0.0;          // zero-mean constraint violation

    double shift_ball(const Vec<D>& x) const {
        return aux_basis->expansion_value(coefficients, x);
    }
};

template <int D>
NeumannLift<D> lift_neumann(const Problem<D>& p, int aux_degree, int aux_quad_order,
                            int boundary_order) {
    if (p.bc.kind != BoundaryCondition<D>::Kind::neumann)
        throw std::invalid_argument("lift_neumann: problem has no inhomogeneous Neumann data");
    if (!p.bc.boundary_data)
        throw std::invalid_argument("lift_neumann: boundary condition carries no flux data");
    if (p.a)
        throw std::invalid_argument("lift_neumann: only identity diffusion is supported");

    NeumannLift<D> out;
    out.aux_basis =
        std::make_shared<BasisSet<D>>(BasisSet<D>::plain_basis(aux_degree));

    const QuadratureRule<D> rule = volume_rule<D>(aux_quad_order);
    const BoundaryRule<D> brule = boundary_rule(p.map, boundary_order);

    auto g = p.bc.boundary_data;
    auto phi = p.map.phi;
    double flux = 0.0;
    for (int i = 0; i < brule.size(); ++i) flux += brule.weights[i] * g(phi(brule.points[i]));

    /* Laplace operator, pulled back; the constant right-hand side c0 is not
     * known until we have the volume, so start from f = 1 and scale. */
    const PointwiseNonlinearity<D> one = [](const Vec<D>&, double) { return 1.0; };
    const PointwiseNonlinearity<D> zero = [](const Vec<D>&, double) { return 0.0; };
    PulledBackCoefficients<D> pb0 = pull_back<D>(p.map, {}, {}, one, zero);
    GalerkinSystem<D> sys(pb0, *out.aux_basis, rule);

    out.volume = sys.weighted_det().sum();
    out.flux = flux;
    out.c0 = -flux / out.volume;

    const int n = sys.size();
    const VectorXd unit_load = sys.load(VectorXd::Zero(n));  // integral of psi_l det J
    VectorXd rhs = out.c0 * unit_load;
    for (int i = 0; i < brule.size(); ++i) {
        const VectorXd psi = out.aux_basis->values_at(brule.points[i]);
        rhs += (brule.weights[i] * g(phi(brule.points[i]))) * psi;
    }

    /* Bordered system pins the zero-mean representative of the Neumann
     * problem (the stiffness alone is singular on constants). */
    MatrixXd K = MatrixXd::Zero(n + 1, n + 1);
    K.topLeftCorner(n, n) = sys.stiffness();
    K.block(0, n, n, 1) = unit_load;
    K.block(n, 0, 1, n) = unit_load.transpose();
    VectorXd full_rhs(n + 1);
    full_rhs.head(n) = rhs;
    full_rhs(n) = 0.0;

    Eigen::PartialPivLU<MatrixXd> lu(K);
    const VectorXd sol = lu.solve(full_rhs);
    if (!sol.allFinite()) throw std::runtime_error("lift_neumann: auxiliary solve failed");
    out.coefficients = sol.head(n);
    out.aux_residual_inf =
        (sys.stiffness() * out.coefficients - rhs + sol(n) * unit_load).template lpNorm<Eigen::Infinity>();
    out.aux_mean = unit_load.dot(out.coefficients);
    return out;
}

/* Pulled-back coefficients of the homogeneous-Neumann problem for w; the
 * shift v* is evaluated ball-side (at quadrature nodes), so no inverse map
 * is needed. */
template <int D>
PulledBackCoefficients<D> lifted_pullback(const Problem<D>& p, const NeumannLift<D>& lift) {
    auto gamma = p.gamma;
    auto f = p.f;
    auto dfdz = p.dfdz;
    const double c0 = lift.c0;
    auto aux_basis = lift.aux_basis;
    VectorXd beta = lift.coefficients;

    auto shift = [aux_basis, beta](const Vec<D>& x) {
        return aux_basis->expansion_value(beta, x);
    };
    /* Geometry factors via the ordinary pullback, then replace the
     * right-hand side with its shifted version. */
    const PointwiseNonlinearity<D> zero = [](const Vec<D>&, double) { return 0.0; };
    PulledBackCoefficients<D> pb = pull_back<D>(p.map, p.a, gamma, zero, zero);

    auto phi = p.map.phi;
    auto det = pb.det_jacobian;
    pb.f_scaled = [f, gamma, c0, shift, phi, det](const Vec<D>& x, double z) {
        const double v = shift(x);
        const Vec<D> s = phi(x);
        const double gz = gamma ? gamma(s) : 0.0;
        return det(x) * (f(s, z + v) - gz * v - c0);
    };
    pb.dfdz_scaled = [dfdz, shift, phi, det](const Vec<D>& x, double z) {
        return det(x) * dfdz(phi(x), z + shift(x));
    };
    return pb;
}

}  // namespace specball
