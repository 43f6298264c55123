#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "basis.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace specball {

/* A coefficient or right-hand-side evaluation produced a non-finite value;
 * the message carries the quadrature node where it happened. */
struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <int D>
struct BoundaryCondition {
    enum class Kind { dirichlet_zero, dirichlet, neumann_zero, neumann };
    Kind kind = Kind::dirichlet_zero;
    ScalarField<D> boundary_data;  // Dirichlet trace or Neumann flux g on the physical boundary
    ScalarField<D> lift;           // Dirichlet only: smooth extension G of g onto Omega
    ScalarField<D> lift_Lg;        // Dirichlet only: (L G)(s) = -div(A grad G) + gamma G
    std::string lift_text;         // reparseable expression for G, "" when not expressible

    bool homogeneous() const { return kind == Kind::dirichlet_zero || kind == Kind::neumann_zero; }
    bool dirichlet() const { return kind == Kind::dirichlet_zero || kind == Kind::dirichlet; }
};

/* The boundary-value problem -div(A grad u) + gamma u = f(s, u) on
 * Omega = Phi(B), with Dirichlet or Neumann data.  Empty a means identity
 * diffusion, empty gamma means zero. */
template <int D>
struct Problem {
    std::string name;
    DomainMap<D> map;
    MatrixField<D> a;
    ScalarField<D> gamma;
    PointwiseNonlinearity<D> f;
    PointwiseNonlinearity<D> dfdz;
    BoundaryCondition<D> bc;
};

namespace detail {
template <int D>
inline std::string point_string(const Vec<D>& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < D; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}
}  // namespace detail

/* Discrete Galerkin operator for one (basis, quadrature) pair.  All basis
 * values/gradients and geometry factors are evaluated once in the
 * constructor and reused by every stiffness/load/Jacobian request, so a
 * Newton iteration costs two dense mat-vecs and one rank-structured GEMM,
 * nothing pointwise.
 *
 * With V(i,m) = psi_i(x_m), G_d(i,m) = d-th gradient component, w_m the
 * quadrature weights and B(x) = det J * J^{-1} A J^{-T}:
 *   stiffness = sum_{d,e} G_d diag(w .* B_de) G_e^T + V diag(w .* gamma~) V^T
 *   load(alpha)_l = sum_m w_m f~(x_m, u_m) V(l,m),  u = V^T alpha
 *   load_jacobian(alpha) = V diag(w .* df~/dz(x_m, u_m)) V^T. */
template <int D, class Basis = BasisSet<D>>
class GalerkinSystem {
  public:
    GalerkinSystem(const PulledBackCoefficients<D>& pb, const Basis& basis,
                   const QuadratureRule<D>& rule)
        : pb_(pb), nodes_(rule.nodes), weights_(rule.size()) {
        const int n = basis.size();
        const int m = rule.size();
        values_.resize(n, m);
        for (auto& g : grads_) g.resize(n, m);

        std::vector<Vec<D>> grad_col(n);
        VectorXd val_col(n);
        for (int q = 0; q < m; ++q) {
            weights_(q) = rule.weights[q];
            basis.eval(nodes_[q], val_col.data(), grad_col.data());
            values_.col(q) = val_col;
            for (int d = 0; d < D; ++d)
                for (int i = 0; i < n; ++i) grads_[d](i, q) = grad_col[i][d];
        }

        wdet_.resize(m);
        for (int q = 0; q < m; ++q) wdet_(q) = weights_(q) * pb_.det_jacobian(nodes_[q]);

        assemble_stiffness();
    }

    int size() const { return static_cast<int>(values_.rows()); }
    const MatrixXd& stiffness() const { return stiffness_; }
    const MatrixXd& node_values() const { return values_; }
    const VectorXd& node_weights() const { return weights_; }
    const std::vector<Vec<D>>& nodes() const { return nodes_; }
    /* quadrature weights times det J; dot with nodal samples integrates over Omega */
    const VectorXd& weighted_det() const { return wdet_; }

    VectorXd load(const VectorXd& alpha) const {
        const VectorXd u = values_.transpose() * alpha;
        VectorXd fw(u.size());
        for (int q = 0; q < u.size(); ++q) {
            const double fv = pb_.f_scaled(nodes_[q], u(q));
            if (!std::isfinite(fv))
                throw EvaluationError("load: non-finite right-hand side at node " +
                                      detail::point_string<D>(nodes_[q]));
            fw(q) = weights_(q) * fv;
        }
        return values_ * fw;
    }

    MatrixXd load_jacobian(const VectorXd& alpha) const {
        const VectorXd u = values_.transpose() * alpha;
        VectorXd dw(u.size());
        for (int q = 0; q < u.size(); ++q) {
            const double dv = pb_.dfdz_scaled(nodes_[q], u(q));
            if (!std::isfinite(dv))
                throw EvaluationError("load_jacobian: non-finite df/dz at node " +
                                      detail::point_string<D>(nodes_[q]));
            dw(q) = weights_(q) * dv;
        }
        return values_ * dw.asDiagonal() * values_.transpose();
    }

    VectorXd residual(const VectorXd& alpha) const { return stiffness_ * alpha - load(alpha); }

  private:
    void assemble_stiffness() {
        const int n = size();
        const int m = static_cast<int>(nodes_.size());
        stiffness_ = MatrixXd::Zero(n, n);

        std::array<std::array<VectorXd, D>, D> bw;  // w .* B_de per node
        for (auto& row : bw)
            for (auto& v : row) v.resize(m);
        VectorXd gw(m);
        bool has_gamma = false;
        for (int q = 0; q < m; ++q) {
            const Mat<D> B = pb_.a_scaled(nodes_[q]);
            const double g = pb_.gamma_scaled(nodes_[q]);
            if (!B.allFinite() || !std::isfinite(g))
                throw EvaluationError("stiffness: non-finite coefficient at node " +
                                      detail::point_string<D>(nodes_[q]));
            for (int d = 0; d < D; ++d)
                for (int e = 0; e < D; ++e) bw[d][e](q) = weights_(q) * B(d, e);
            gw(q) = weights_(q) * g;
            has_gamma = has_gamma || g != 0.0;
        }

        MatrixXd scaled(n, m);
        for (int d = 0; d < D; ++d)
            for (int e = 0; e < D; ++e) {
                scaled = grads_[d] * bw[d][e].asDiagonal();
                stiffness_.noalias() += scaled * grads_[e].transpose();
            }
        if (has_gamma) {
            scaled = values_ * gw.asDiagonal();
            stiffness_.noalias() += scaled * values_.transpose();
        }
    }

    PulledBackCoefficients<D> pb_;
    std::vector<Vec<D>> nodes_;
    VectorXd weights_;
    VectorXd wdet_;
    MatrixXd values_;
    std::array<MatrixXd, D> grads_;
    MatrixXd stiffness_;
};

}  // namespace specball
