#pragma once

#include "fdmec/inner_solver.hpp"
#include "fdmec/problem.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fdmec {

// One cell's copy of the shared variables in the full flat layout. The copy
// carries the whole consensus set (associations, band shares, power fractions,
// compute shares) plus the cell's own cache column; cache columns belonging to
// other cells are pinned to zero.
struct LocalState {
    std::vector<double> v;
};

// Consensus targets in the same layout. Cache-column slots hold the owning
// cell's values so the state assembles directly into DecisionVars.
struct GlobalState {
    std::vector<double> v;
};

// One multiplier per (cell copy, consensus entry); cache-column slots unused.
struct DualState {
    std::vector<std::vector<double>> m;
};

struct AdmmConfig {
    double rho = 1.0;
    double tol_primal = -1.0; // auto when negative: 1e-4 * sqrt(consensus entries)
    double tol_dual = -1.0;
    std::size_t max_iter = 2000;
    bool residual_balancing = true;
    double assembled_tol = 1e-4; // normalized residual gate on the assembled point
    // Relaxation weight applied to the local iterates before the averaging and
    // dual steps: 1.0 reproduces the plain updates, values in (1, 2) blend in
    // momentum that typically cuts the iteration count. The zero-sum dual
    // identity is unaffected because the same relaxed point feeds both steps.
    double relaxation = 1.0;
    InnerOptions inner = make_local_inner_options();

    static InnerOptions make_local_inner_options() {
        InnerOptions o;
        o.max_inner = 2000;
        o.max_outer = 30;
        o.stall_tol = 1e-9;
        // Hard ceiling on the penalty weight; the consensus loop lowers the
        // effective cap while disagreement is large, because gradient steps
        // shrink with the penalty curvature and precision is wasted on
        // subproblems whose target is still moving.
        o.sigma_max = 1e5;
        return o;
    }
};

struct SolveReport {
    std::vector<double> objective_trace; // assembled objective, natural units
    std::vector<double> primal_trace;    // stacked ||local - global||_2
    std::vector<double> dual_trace;      // rho * ||global_t - global_{t-1}||_2
    std::string termination;             // "converged" | "max-iter"
    std::size_t iterations = 0;
    std::size_t inner_iterations = 0;    // summed over all local solves
    double rho_final = 0.0;
    double max_dual_sum = 0.0;           // worst per-entry |sum over cells of duals|
    DecisionVars vars;                   // assembled solution
};

// True when an entry belongs to the consensus set (everything but cache columns).
bool is_consensus_entry(const ProblemInstance& inst, std::size_t e);

// Value of the consensus-penalized objective in solver scale (utilities divided
// by inst.scale, minimization sense): sum over cells of minus the cell utility
// at its copy, plus dual * (local - global) + (rho/2)(local - global)^2 over
// every consensus entry of every copy. Returns +infinity when some copy
// violates its feasible set beyond phi_tol (normalized residuals).
double augmented_lagrangian(const ProblemInstance& inst, const std::vector<LocalState>& locals,
                            const GlobalState& global, const DualState& duals, double rho,
                            double phi_tol = 1e-6);

// Minimizes one cell's slice of the penalized objective over its feasible set,
// warm-started from the current copy. `al_mult` warm-starts the penalty-row
// multipliers of the local solver across calls.
InnerReport local_update(const ProblemInstance& inst, std::size_t k, LocalState& local,
                         const GlobalState& global, const std::vector<double>& dual_k,
                         double rho, const InnerOptions& opts,
                         std::vector<double>* al_mult = nullptr);

// Consensus entries become mean over cells of (local + dual/rho), clamped to
// the box; cache-column entries are taken from the owning cell's copy.
GlobalState global_update(const ProblemInstance& inst, const std::vector<LocalState>& locals,
                          const DualState& duals, double rho);

// dual += rho * (local - global) per consensus entry of every copy.
void dual_update(const ProblemInstance& inst, DualState& duals,
                 const std::vector<LocalState>& locals, const GlobalState& global, double rho);

// True when the newest residual exceeds `factor` times the residual `window`
// iterations earlier (entries at or below ignore_below never trigger).
bool residuals_diverging(const std::vector<double>& trace, std::size_t window = 50,
                         double factor = 10.0, double ignore_below = 0.0);

// Full consensus solve: an initial penalty-free round seeds the copies from
// each cell's own optimum, then local/global/dual rounds run until both
// residuals and the assembled constraint residuals pass their tolerances.
// Throws SolverError when the primal residual diverges.
SolveReport admm_solve(const ProblemInstance& inst, const AdmmConfig& config = {});

std::string report_to_json(const SolveReport& report);

} // namespace fdmec
