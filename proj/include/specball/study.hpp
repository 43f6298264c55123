#pragma once

#include <functional>
#include <iomanip>
#include <type_traits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "problems.hpp"
#include "solver.hpp"

namespace specball {

/* One line of a degree-refinement study. */
struct StudyRow {
    int n = 0;                 // continuation degree
    int basis_size = 0;        // dimension of the trial space at that degree
    int newton_iterations = 0;
    double residual_inf = 0.0;
    double max_error = std::numeric_limits<double>::quiet_NaN();
};

template <int D>
struct Study {
    ContinuationResult<D> run;
    std::vector<StudyRow> rows;                    // one per completed degree
    std::optional<SpectralSolution<D>> reference;  // engaged when a reference solve was used
    enum class ErrorKind { none, truth, reference } error_kind = ErrorKind::none;
};

/* Runs the continuation and fills in the error column: against the analytic
 * solution when one is known, else against a higher-degree reference solve
 * of the same problem (also reached by continuation, so hard problems keep
 * their warm starts).  With neither, max_error stays NaN. */
template <int D>
Study<D> run_study(const Problem<D>& problem, const SolveConfig& cfg,
                   const std::type_identity_t<std::function<double(const Vec<D>&)>>& truth_ball,
                   int reference_degree) {
    Study<D> study;
    study.run = continue_in_degree(problem, cfg);

    const auto grid = reference_grid<D>();
    std::vector<double> errors(study.run.solutions.size(),
                               std::numeric_limits<double>::quiet_NaN());
    if (truth_ball) {
        study.error_kind = Study<D>::ErrorKind::truth;
        for (std::size_t i = 0; i < study.run.solutions.size(); ++i)
            errors[i] = max_error_vs(study.run.solutions[i], truth_ball, grid);
    } else if (reference_degree > 0 && !study.run.solutions.empty()) {
        if (reference_degree <= cfg.n_end)
            throw std::invalid_argument("run_study: reference degree must exceed n_end");
        SolveConfig ref_cfg = cfg;
        ref_cfg.n_end = reference_degree;
        ContinuationResult<D> ref_run = continue_in_degree(problem, ref_cfg);
        if (!ref_run.final_converged())
            throw std::runtime_error("run_study: reference solve failed: " + ref_run.message);
        study.reference = std::move(ref_run.solutions.back());
        study.error_kind = Study<D>::ErrorKind::reference;
        errors = reference_error(study.run.solutions, *study.reference, grid);
    }

    for (std::size_t i = 0; i < study.run.solutions.size(); ++i) {
        const auto& sol = study.run.solutions[i];
        study.rows.push_back(StudyRow{sol.degree, static_cast<int>(sol.coefficients.size()),
                                      sol.newton_iterations, sol.residual_inf, errors[i]});
    }
    return study;
}

template <int D>
Study<D> run_study(const CatalogEntry<D>& entry) {
    return run_study(entry.problem, entry.defaults, entry.truth_ball, entry.reference_degree);
}

/* Fixed machine-readable schema; keep the header stable, downstream scripts
 * key on it. */
inline void write_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
    out << "n,N_n,newton_iters,residual_inf,max_error\n";
    for (const StudyRow& r : rows) {
        out << r.n << ',' << r.basis_size << ',' << r.newton_iterations << ','
            << detail::full_precision(r.residual_inf) << ','
            << detail::full_precision(r.max_error) << '\n';
    }
}

inline void write_table(std::ostream& out, const std::vector<StudyRow>& rows) {
    out << std::setw(4) << "n" << std::setw(8) << "N_n" << std::setw(8) << "newton"
        << std::setw(14) << "residual" << std::setw(14) << "max_error" << '\n';
    std::ostringstream num;
    num << std::scientific << std::setprecision(3);
    for (const StudyRow& r : rows) {
        num.str("");
        num << r.residual_inf;
        const std::string res = num.str();
        num.str("");
        num << r.max_error;
        out << std::setw(4) << r.n << std::setw(8) << r.basis_size << std::setw(8)
            << r.newton_iterations << std::setw(14) << res << std::setw(14) << num.str() << '\n';
    }
}

}  // namespace specball
