#pragma once

#include "fdmec/inner_solver.hpp"
#include "fdmec/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace fdmec {

inline constexpr std::ptrdiff_t kUnassigned = -1;

// Binary association and caching decision distilled from a relaxed solution.
// Each user is served by at most one cell; a cache flag may only be set at the
// serving cell of a user whose content is not already hit, and the flagged
// sizes respect every cell's cache capacity.
struct IntegerAssignment {
    std::vector<std::ptrdiff_t> assoc1; // serving cell per service-I user, kUnassigned when none
    std::vector<std::ptrdiff_t> assoc2; // serving cell per service-II user
    Matrix<std::uint8_t> cache_flags;   // [i][k], 1 = refresh user i's content at cell k

    bool operator==(const IntegerAssignment&) const = default;
};

// Argmax rounding: each user goes to the cell with the largest association
// weight (lowest index on ties); rows summing to <= 1e-9 stay unassigned.
// Cache flags: entries whose recovered refreshment share ct/x reaches 0.5 are
// taken greedily by descending ct under the per-cell capacity.
IntegerAssignment round_assignment(const DecisionVars& vars, const ProblemInstance& inst);

// Re-solves the continuous allocation with associations and cache flags pinned
// to `assignment`. With x binary the rate and deadline floors become box lower
// bounds at the serving cell, so the reduced program needs only budget-row
// projections. Throws InfeasibleError listing the binding constraints when the
// floors alone cannot fit.
std::pair<DecisionVars, InnerReport> reoptimize_continuous(const IntegerAssignment& assignment,
                                                           const ProblemInstance& inst,
                                                           const DecisionVars* warm_start = nullptr,
                                                           const InnerOptions& opts = {});

struct RecoveryResult {
    IntegerAssignment assignment;
    DecisionVars vars;
    InnerReport report;
    std::vector<std::size_t> dropped1, dropped2; // users shed to restore feasibility
    double objective = 0.0;         // recovered utility, raw units
    double relaxed_objective = 0.0; // utility of the relaxed input, raw units
    double integrality_gap = 0.0;   // (relaxed - recovered) / max(|relaxed|, 1e-12)
};

// Full pipeline: round, shed users while the pinned floors overshoot a budget
// (per-user impossibilities first, then the lowest-utility contributor of the
// violated budget), then re-optimize the continuous shares. Throws
// InfeasibleError only when even an empty assignment cannot be made feasible.
RecoveryResult recover_solution(const ProblemInstance& inst, const DecisionVars& relaxed,
                                const InnerOptions& opts = {});

// Constraint residuals of a recovered solution. Users left unassigned receive
// no service, so their rate and deadline floors are not counted; every shared
// budget and coupling is still checked in full.
ConstraintResiduals assigned_residuals(const ProblemInstance& inst, const DecisionVars& vars,
                                       const IntegerAssignment& assignment);

} // namespace fdmec
