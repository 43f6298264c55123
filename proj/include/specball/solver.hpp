#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "basis.hpp"
#include "lifts.hpp"
#include "types.hpp"

namespace specball {

/* The damped-Newton matrix could not be factored into a usable step. */
struct SingularNewtonMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveConfig {
    int n_start = 1;
    int n_end = 10;

    double newton_tol = 1e-12;  // on the residual infinity norm
    int max_newton_iterations = 50;
    double damping_factor = 0.5;
    int max_damping_steps = 20;

    enum class GuessKind { zeros, constant, coefficients };
    GuessKind guess = GuessKind::zeros;
    double guess_value = 0.0;        // for GuessKind::constant: every coefficient
    VectorXd guess_coefficients;     // for GuessKind::coefficients (zero-padded)

    /* quadrature order for degree n is n + quad_offset unless quad_override
     * is positive, in which case it is used verbatim at every degree. */
    int quad_offset = 2;
    int quad_override = -1;

    /* Neumann lift controls; negatives mean "derive from n_end". */
    int aux_degree = -1;     // default n_end + 5
    int aux_quad = -1;       // default aux_degree + 2
    int boundary_order = -1; // default 512 angles (2D) / 48 polar points (3D)

    int quad_order_for(int n) const { return quad_override > 0 ? quad_override : n + quad_offset; }
};

/* One damped-Newton run.  Non-convergence is a flagged result (best iterate
 * retained), not an exception; only an unusable Newton matrix throws. */
struct NewtonResult {
    VectorXd alpha;
    bool converged = false;
    int iterations = 0;
    double residual_inf = std::numeric_limits<double>::infinity();
    std::vector<double> residual_history;  // initial residual, then one entry per step
    int backtracks = 0;                    // total step halvings across all iterations
};

/* Newton with backtracking on the residual norm: each iteration solves
 * (stiffness - load_jacobian) delta = -residual and halves the step (up to
 * max_damping_steps times) until the residual strictly decreases.  A trial
 * step whose right-hand side evaluation blows up is treated like any other
 * rejected step.  Any type exposing stiffness(), load_jacobian(alpha) and
 * residual(alpha) works as the system. */
template <class System>
NewtonResult newton_solve(const System& system, VectorXd alpha, const SolveConfig& cfg) {
    NewtonResult out;
    VectorXd r = system.residual(alpha);
    double rn = r.template lpNorm<Eigen::Infinity>();
    out.residual_history.push_back(rn);

    while (std::isfinite(rn) && rn > cfg.newton_tol &&
           out.iterations < cfg.max_newton_iterations) {
        const MatrixXd J = system.stiffness() - system.load_jacobian(alpha);
        Eigen::PartialPivLU<MatrixXd> lu(J);
        const VectorXd delta = lu.solve(-r);
        if (!delta.allFinite()) {
            std::ostringstream os;
            os << "newton_solve: singular Newton matrix at iteration " << out.iterations + 1
               << " (residual " << rn << ")";
            throw SingularNewtonMatrix(os.str());
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k <= cfg.max_damping_steps; ++k) {
            const VectorXd cand = alpha + lambda * delta;
            double crn = std::numeric_limits<double>::infinity();
            VectorXd cr;
            bool usable = true;
            try {
                cr = system.residual(cand);
                crn = cr.template lpNorm<Eigen::Infinity>();
                usable = std::isfinite(crn);
            } catch (const EvaluationError&) {
                usable = false;  // stepped outside the domain of f; shrink
            }
            if (usable && crn < rn) {
                alpha = cand;
                r = std::move(cr);
                rn = crn;
                accepted = true;
                break;
            }
            lambda *= cfg.damping_factor;
            ++out.backtracks;
        }
        if (!accepted) break;  // stagnated: report the best iterate, flagged
        ++out.iterations;
        out.residual_history.push_back(rn);
    }

    out.alpha = std::move(alpha);
    out.residual_inf = rn;
    out.converged = std::isfinite(rn) && rn <= cfg.newton_tol;
    return out;
}

inline VectorXd zero_pad(const VectorXd& v, int n) {
    VectorXd out = VectorXd::Zero(n);
    out.head(std::min<int>(n, static_cast<int>(v.size()))) = v.head(std::min<int>(n, static_cast<int>(v.size())));
    return out;
}

/* A computed spectral expansion plus everything needed to evaluate it:
 * basis, coefficients, the domain map, and an optional additive shift
 * (from a Dirichlet lift).  Solutions of a Neumann-lifted problem already
 * contain the auxiliary expansion in their coefficients. */
template <int D>
struct SpectralSolution {
    std::string problem_name;
    BasisSet<D> basis;
    VectorXd coefficients;
    int degree = 0;  // continuation degree; basis.degree() can exceed it after a Neumann lift
    DomainMap<D> map;
    std::function<double(const Vec<D>&)> shift;  // ball-side, empty when none
    std::string shift_text;  // reparseable expression for the shift, "" if not expressible

    bool converged = true;
    int newton_iterations = 0;
    double residual_inf = 0.0;
    std::vector<double> residual_history;

    double eval_ball(const Vec<D>& x) const {
        double v = basis.expansion_value(coefficients, x);
        if (shift) v += shift(x);
        return v;
    }

    double eval_physical(const Vec<D>& s) const {
        if (!map.has_inverse())
            throw std::runtime_error("eval_physical: domain map '" + map.name +
                                     "' has no inverse; evaluate at ball points instead");
        return eval_ball(map.inverse(s));
    }
};

template <int D>
struct ContinuationResult {
    std::vector<SpectralSolution<D>> solutions;  // one per degree, converged or not
    bool ok = true;                              // every degree reached newton_tol
    std::vector<int> failed_degrees;
    std::string message;  // degree-stamped report of the failures, "" when ok

    bool final_converged() const { return !solutions.empty() && solutions.back().converged; }
};

/* Degree continuation: solve at n_start with the configured guess, then at
 * each following degree start Newton from the previous coefficient vector
 * zero-padded into the larger basis (exact thanks to basis nestedness).
 * Dirichlet problems use the bubble basis (zero trace built in); Neumann
 * problems the plain basis.  Inhomogeneous data is lifted away first.
 * A degree whose Newton run stalls is recorded (flagged solution, listed in
 * failed_degrees) and its best iterate still seeds the next degree: discrete
 * branches can have degree gaps where no nearby root exists, and the
 * continuation recovers once the space is rich enough. */
template <int D>
ContinuationResult<D> continue_in_degree(const Problem<D>& problem, const SolveConfig& cfg) {
    using BC = BoundaryCondition<D>;
    if (cfg.n_start < 0 || cfg.n_end < cfg.n_start)
        throw std::invalid_argument("continue_in_degree: need 0 <= n_start <= n_end");

    ContinuationResult<D> out;

    Problem<D> solve_problem = problem;
    std::function<double(const Vec<D>&)> shift;
    std::string shift_text;
    bool neumann_lifted = false;
    NeumannLift<D> nlift;

    if (problem.bc.kind == BC::Kind::dirichlet) {
        DirichletLift<D> dl = lift_dirichlet(problem);
        solve_problem = dl.shifted;
        shift = dl.shift_ball;
        shift_text = problem.bc.lift_text;
    } else if (problem.bc.kind == BC::Kind::neumann) {
        const int aux_degree = cfg.aux_degree > 0 ? cfg.aux_degree : cfg.n_end + 5;
        if (aux_degree < cfg.n_end)
            throw std::invalid_argument("continue_in_degree: aux_degree must be >= n_end");
        const int aux_quad = cfg.aux_quad > 0 ? cfg.aux_quad : aux_degree + 2;
        const int border = cfg.boundary_order > 0 ? cfg.boundary_order : (D == 2 ? 512 : 48);
        nlift = lift_neumann(problem, aux_degree, aux_quad, border);
        neumann_lifted = true;
    }

    const bool dirichlet = problem.bc.dirichlet();

    VectorXd prev;  // previous degree's raw coefficients (pre-shift)
    for (int n = cfg.n_start; n <= cfg.n_end; ++n) {
        const BasisSet<D> basis =
            dirichlet ? BasisSet<D>::bubble_basis(n) : BasisSet<D>::plain_basis(n);
        const QuadratureRule<D> rule = volume_rule<D>(cfg.quad_order_for(n));
        const PulledBackCoefficients<D> pb =
            neumann_lifted ? lifted_pullback(problem, nlift)
                           : pull_back<D>(solve_problem.map, solve_problem.a,
                                          solve_problem.gamma, solve_problem.f,
                                          solve_problem.dfdz);
        GalerkinSystem<D> system(pb, basis, rule);

        VectorXd guess;
        if (n == cfg.n_start) {
            switch (cfg.guess) {
                case SolveConfig::GuessKind::zeros:
                    guess = VectorXd::Zero(basis.size());
                    break;
                case SolveConfig::GuessKind::constant:
                    guess = VectorXd::Constant(basis.size(), cfg.guess_value);
                    break;
                case SolveConfig::GuessKind::coefficients:
                    if (cfg.guess_coefficients.size() > basis.size())
                        throw std::invalid_argument(
                            "continue_in_degree: guess vector longer than the starting basis");
                    guess = zero_pad(cfg.guess_coefficients, basis.size());
                    break;
            }
        } else {
            guess = zero_pad(prev, basis.size());
        }

        NewtonResult res = newton_solve(system, std::move(guess), cfg);
        if (!res.converged) {
            out.ok = false;
            out.failed_degrees.push_back(n);
            std::ostringstream os;
            if (!out.message.empty()) os << out.message << "; ";
            os << "Newton did not reach tol " << cfg.newton_tol << " at degree " << n
               << " (residual " << res.residual_inf << " after " << res.iterations
               << " iterations)";
            out.message = os.str();
        }
        prev = res.alpha;

        SpectralSolution<D> sol{problem.name,
                                neumann_lifted ? *nlift.aux_basis : basis,
                                VectorXd(),
                                n,
                                problem.map,
                                shift,
                                shift_text};
        if (neumann_lifted)
            sol.coefficients =
                zero_pad(res.alpha, nlift.aux_basis->size()) + nlift.coefficients;
        else
            sol.coefficients = res.alpha;
        sol.converged = res.converged;
        sol.newton_iterations = res.iterations;
        sol.residual_inf = res.residual_inf;
        sol.residual_history = std::move(res.residual_history);
        out.solutions.push_back(std::move(sol));
    }
    return out;
}

/* Fixed tensor evaluation grids covering the closed ball, used for error
 * reporting so different runs are comparable number for number.
 * 2D: 51 radii x 101 angles; 3D: 21 radii x 41 azimuths x 21 polar angles. */
template <int D>
std::vector<Vec<D>> reference_grid();

template <>
inline std::vector<Vec<2>> reference_grid<2>() {
    std::vector<Vec<2>> pts;
    pts.reserve(51 * 101);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i <= 50; ++i) {
        const double r = i / 50.0;
        for (int j = 0; j < 101; ++j) {
            const double t = two_pi * j / 101.0;
            pts.emplace_back(r * std::cos(t), r * std::sin(t));
        }
    }
    return pts;
}

template <>
inline std::vector<Vec<3>> reference_grid<3>() {
    std::vector<Vec<3>> pts;
    pts.reserve(21 * 41 * 21);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i <= 20; ++i) {
        const double r = i / 20.0;
        for (int j = 0; j < 41; ++j) {
            const double az = two_pi * j / 41.0;
            for (int k = 0; k <= 20; ++k) {
                const double pol = std::numbers::pi * k / 20.0;
                pts.emplace_back(r * std::sin(pol) * std::cos(az),
                                 r * std::sin(pol) * std::sin(az), r * std::cos(pol));
            }
        }
    }
    return pts;
}

/* Max difference |u_n - u_ref| over the grid, one value per study solution.
 * Both expansions must come from the same run (same problem, map, basis
 * family and shift), so the difference reduces to a coefficient difference
 * in the bigger basis and any common shift cancels exactly. */
template <int D>
std::vector<double> reference_error(const std::vector<SpectralSolution<D>>& sols,
                                    const SpectralSolution<D>& ref,
                                    const std::vector<Vec<D>>& grid) {
    for (const auto& s : sols) {
        if (s.problem_name != ref.problem_name)
            throw std::invalid_argument("reference_error: solutions of different problems");
        if (s.map.name != ref.map.name)
            throw std::invalid_argument("reference_error: solutions on different domains");
        if (s.basis.kind() != ref.basis.kind())
            throw std::invalid_argument("reference_error: mixed basis kinds");
        if (s.degree >= ref.degree)
            throw std::invalid_argument(
                "reference_error: reference degree must exceed every study degree");
    }
    const int nref = ref.basis.size();
    std::vector<VectorXd> diffs;
    diffs.reserve(sols.size());
    for (const auto& s : sols) {
        if (s.coefficients.size() > nref)
            throw std::invalid_argument("reference_error: study expansion larger than reference");
        diffs.push_back(zero_pad(s.coefficients, nref) - zero_pad(ref.coefficients, nref));
    }

    std::vector<double> err(sols.size(), 0.0);
    VectorXd vals(nref);
    for (const Vec<D>& p : grid) {
        ref.basis.eval(p, vals.data());
        for (std::size_t i = 0; i < diffs.size(); ++i)
            err[i] = std::max(err[i], std::abs(vals.dot(diffs[i])));
    }
    return err;
}

/* Max |u - truth| over a grid of ball points; truth takes the ball point. */
template <int D, class F>
double max_error_vs(const SpectralSolution<D>& sol, F&& truth_ball,
                    const std::vector<Vec<D>>& grid) {
    double e = 0.0;
    for (const Vec<D>& p : grid) e = std::max(e, std::abs(sol.eval_ball(p) - truth_ball(p)));
    return e;
}

/* L2(Omega) norm of the solution, integrated with a rule exact past twice
 * the basis degree. */
template <int D>
double solution_l2_norm(const SpectralSolution<D>& sol) {
    const QuadratureRule<D> rule = volume_rule<D>(sol.basis.degree() + 2);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        const Vec<D>& x = rule.nodes[q];
        const double u = sol.eval_ball(x);
        acc += rule.weights[q] * u * u * sol.map.jacobian(x).determinant();
    }
    return std::sqrt(acc);
}

}  // namespace specball
