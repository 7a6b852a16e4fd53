#pragma once

#include "fdmec/problem.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fdmec {

// Sparse linear inequality sum_m coef[m] * v[idx[m]] <= bound.
struct SparseRow {
    std::vector<std::size_t> idx;
    std::vector<double> coef;
    double bound = 0.0;
};

// Box-constrained smooth minimization with two kinds of linear rows:
// projection_rows are pairwise disjoint positive-coefficient budget rows kept
// exactly feasible by projection; penalty_rows are general rows handled by an
// augmented-Lagrangian outer loop. The evaluator returns the objective value
// (minimization sense) and fills the gradient. The evaluator may reference
// outside state; the caller keeps that state alive for the solver's lifetime.
struct SmoothProblem {
    std::size_t n = 0;
    std::vector<double> lb, ub;
    std::function<double(const double*, double*)> eval;
    std::vector<SparseRow> projection_rows;
    std::vector<SparseRow> penalty_rows;
};

struct InnerOptions {
    double pg_tol = 1e-6;        // infinity norm of v - P(v - grad)
    double feas_tol = 1e-6;      // max violation of normalized penalty rows
    std::size_t max_inner = 5000; // gradient steps per multiplier stage
    std::size_t max_outer = 50;   // multiplier updates
    double sigma0 = 10.0;
    double sigma_growth = 10.0;
    double sigma_max = 1e12;
    double armijo_c = 1e-4;
    // When positive, a stage also counts as solved after three consecutive
    // accepted steps whose improvement falls below stall_tol * (1 + |f|).
    // The unit-step residual scales with the penalty weight, so demanding it
    // alone can cost millions of steps on stiff stages that are already at
    // their numerical floor. Zero keeps the strict criterion.
    double stall_tol = 0.0;
};

enum class InnerStatus { Converged, MaxIter, Stalled };

struct InnerReport {
    InnerStatus status = InnerStatus::MaxIter;
    std::size_t outer_iters = 0;
    std::size_t inner_iters = 0; // total gradient steps across stages
    double objective = 0.0;      // final evaluator value
    double pg_residual = 0.0;
    double max_violation = 0.0;  // normalized penalty rows; 0 when none exist
    double sigma_final = 0.0;    // penalty weight at exit; warm-start via sigma0
    std::vector<double> objective_trace; // accepted steps of the final stage
};

const char* to_string(InnerStatus s);

// Exact Euclidean projection of the row's member coordinates of v onto
// {sum coef * v <= bound} intersected with the box; non-members untouched.
// Coefficients must be positive. Throws InfeasibleError when the lower bounds
// alone overshoot the budget.
void project_row(const SparseRow& row, const std::vector<double>& lb,
                 const std::vector<double>& ub, std::vector<double>& v);

// Projection onto box and all projection rows (disjointness makes it exact).
void project_feasible(const SmoothProblem& prob, std::vector<double>& v);

// `multipliers` optionally warm-starts and returns the augmented-Lagrangian
// multipliers (one per penalty row, in the row-normalized metric).
InnerReport solve_projected_gradient(const SmoothProblem& prob, std::vector<double>& v,
                                     const InnerOptions& opts,
                                     std::vector<double>* multipliers = nullptr);

double max_penalty_violation(const SmoothProblem& prob, const std::vector<double>& v);

// Rows of the full allocation program. Budget rows (association rows, band
// totals, power total, cache capacities, compute columns) are disjoint and go
// to projection; rate floors, power-coverage rows, and the tilde couplings go
// to penalties. The returned problem references `inst`.
SmoothProblem assemble_full_problem(const ProblemInstance& inst);

// Strictly positive point (outside forced zeros) that satisfies every
// projection row with slack: associations 1/(2S), tilde shares 1/(2 K S).
std::vector<double> interior_point(const ProblemInstance& inst);

// 0.9 * constructive + 0.1 * interior, the solver's default start.
std::vector<double> blend_start(const ProblemInstance& inst, const DecisionVars& constructive);

struct CentralizedResult {
    DecisionVars vars;
    InnerReport report;
};

// Reference solver for the whole program: constructive feasibility check,
// blended start, then the projected-gradient/penalty method above.
CentralizedResult solve_centralized(const ProblemInstance& inst, const InnerOptions& opts = {});

} // namespace fdmec
