#include "fdmec/recovery.hpp"

#include "fdmec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace fdmec {

namespace {

constexpr double kRowZero = 1e-9;   // association row sums below this mean "unassigned"
constexpr double kCapSlack = 1e-12; // relative slack when packing cache capacities

std::ptrdiff_t argmax_row(const Matrix<double>& m, std::size_t row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) sum += m(row, k);
    if (sum <= kRowZero) return kUnassigned;
    std::size_t best = 0;
    for (std::size_t k = 1; k < m.cols(); ++k) {
        if (m(row, k) > m(row, best)) best = k;
    }
    return static_cast<std::ptrdiff_t>(best);
}

// Which shared budget a pinned assignment overshoots.
enum class BudgetId { DlBand, UlBand, BackhaulPower, Compute, Cache };

struct AssignmentCheck {
    bool ok = true;
    std::vector<std::size_t> infeasible1, infeasible2; // users that can never fit alone
    bool budget_violated = false;
    BudgetId budget = BudgetId::DlBand;
    std::size_t budget_cell = 0; // for Compute / Cache
    std::vector<std::string> binding;
};

double dl_floor(const ProblemInstance& inst, std::size_t i, std::size_t k) {
    return inst.rate_req_bps[i] / (inst.bd_hz * inst.r1(i, k));
}

double ul_floor_share(const ProblemInstance& inst, std::size_t j, std::size_t k) {
    return inst.ul_floor_bps[j] / (inst.bu_hz * inst.r2(j, k));
}

double cpu_floor_share(const ProblemInstance& inst, std::size_t j, std::size_t k) {
    return inst.cpu_floor_cps[j] / inst.mec_speed_cps[k];
}

AssignmentCheck check_assignment(const ProblemInstance& inst, const IntegerAssignment& asg) {
    AssignmentCheck out;
    auto fail = [&out](std::string text) {
        out.ok = false;
        out.binding.push_back(std::move(text));
    };

    double sum_dl = 0.0, sum_ul = 0.0, sum_pow = 0.0;
    std::vector<double> sum_z(inst.S, 0.0), sum_cache(inst.S, 0.0);

    for (std::size_t i = 0; i < inst.K1; ++i) {
        const std::ptrdiff_t kk = asg.assoc1[i];
        if (kk == kUnassigned) continue;
        const auto k = static_cast<std::size_t>(kk);
        const double y = dl_floor(inst, i, k);
        const double a = inst.psi(i, k);
        bool bad = false;
        if (y > 1.0) {
            fail("service-I user " + std::to_string(i) + " needs downlink share " +
                 std::to_string(y) + " > 1 at cell " + std::to_string(k));
            bad = true;
        }
        if (a > 1.0) {
            fail("service-I user " + std::to_string(i) + " needs backhaul power share " +
                 std::to_string(a) + " > 1 at cell " + std::to_string(k));
            bad = true;
        }
        if (bad) {
            out.infeasible1.push_back(i);
            continue;
        }
        sum_dl += y;
        sum_pow += a;
        for (std::size_t n = 0; n < inst.S; ++n) {
            if (asg.cache_flags(i, n)) sum_cache[n] += inst.size_bits[i];
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        const std::ptrdiff_t kk = asg.assoc2[j];
        if (kk == kUnassigned) continue;
        const auto k = static_cast<std::size_t>(kk);
        const double y = ul_floor_share(inst, j, k);
        const double z = cpu_floor_share(inst, j, k);
        bool bad = false;
        if (y > 1.0) {
            fail("service-II user " + std::to_string(j) + " needs uplink share " +
                 std::to_string(y) + " > 1 at cell " + std::to_string(k));
            bad = true;
        }
        if (z > 1.0) {
            fail("service-II user " + std::to_string(j) + " needs compute share " +
                 std::to_string(z) + " > 1 at cell " + std::to_string(k));
            bad = true;
        }
        if (bad) {
            out.infeasible2.push_back(j);
            continue;
        }
        sum_ul += y;
        sum_z[k] += z;
    }
    if (!out.infeasible1.empty() || !out.infeasible2.empty()) return out;

    auto budget = [&](double used, double cap, BudgetId id, std::size_t cell,
                      const std::string& name) {
        if (used <= cap * (1.0 + kCapSlack)) return;
        fail(name + " needs " + std::to_string(used) + " of capacity " + std::to_string(cap));
        if (!out.budget_violated) {
            out.budget_violated = true;
            out.budget = id;
            out.budget_cell = cell;
        }
    };
    budget(sum_dl, 1.0, BudgetId::DlBand, 0, "downlink band");
    budget(sum_ul, 1.0, BudgetId::UlBand, 0, "uplink band");
    budget(sum_pow, 1.0, BudgetId::BackhaulPower, 0, "backhaul power");
    for (std::size_t k = 0; k < inst.S; ++k) {
        budget(sum_z[k], 1.0, BudgetId::Compute, k, "compute at cell " + std::to_string(k));
        budget(sum_cache[k], inst.cache_capacity_bits[k], BudgetId::Cache, k,
               "cache at cell " + std::to_string(k));
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& parts) {
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << "; ";
        os << parts[i];
    }
    return os.str();
}

void validate_shapes(const ProblemInstance& inst, const IntegerAssignment& asg) {
    if (asg.assoc1.size() != inst.K1 || asg.assoc2.size() != inst.K2 ||
        asg.cache_flags.rows() != inst.K1 || asg.cache_flags.cols() != inst.S) {
        throw ValidationError("assignment shape does not match the instance");
    }
    for (std::size_t i = 0; i < inst.K1; ++i) {
        if (asg.assoc1[i] != kUnassigned &&
            static_cast<std::size_t>(asg.assoc1[i]) >= inst.S) {
            throw ValidationError("assignment names an unknown cell");
        }
        for (std::size_t k = 0; k < inst.S; ++k) {
            if (!asg.cache_flags(i, k)) continue;
            if (inst.ub[inst.ic(i, k)] <= 0.0) {
                throw ValidationError("cache flag set where refreshment is disabled (user " +
                                      std::to_string(i) + ", cell " + std::to_string(k) + ")");
            }
            if (asg.assoc1[i] != static_cast<std::ptrdiff_t>(k)) {
                throw ValidationError("cache flag set away from the serving cell (user " +
                                      std::to_string(i) + ")");
            }
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        if (asg.assoc2[j] != kUnassigned &&
            static_cast<std::size_t>(asg.assoc2[j]) >= inst.S) {
            throw ValidationError("assignment names an unknown cell");
        }
    }
}

} // namespace

IntegerAssignment round_assignment(const DecisionVars& vars, const ProblemInstance& inst) {
    IntegerAssignment out;
    out.assoc1.resize(inst.K1, kUnassigned);
    out.assoc2.resize(inst.K2, kUnassigned);
    out.cache_flags = Matrix<std::uint8_t>(inst.K1, inst.S, 0);

    for (std::size_t i = 0; i < inst.K1; ++i) out.assoc1[i] = argmax_row(vars.x1, i);
    for (std::size_t j = 0; j < inst.K2; ++j) out.assoc2[j] = argmax_row(vars.x2, j);

    // Candidates whose recovered refreshment share rounds up, richest first.
    struct Candidate {
        std::size_t i, k;
        double ct;
    };
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < inst.K1; ++i) {
        if (out.assoc1[i] == kUnassigned) continue;
        const auto k = static_cast<std::size_t>(out.assoc1[i]);
        if (inst.ub[inst.ic(i, k)] <= 0.0) continue; // already hit or caching disabled
        const double x = std::max(vars.x1(i, k), kRowZero);
        if (vars.ct(i, k) / x < 0.5) continue;
        cands.push_back({i, k, vars.ct(i, k)});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.ct != b.ct) return a.ct > b.ct;
        return a.i < b.i;
    });
    std::vector<double> used(inst.S, 0.0);
    for (const Candidate& c : cands) {
        const double cap = inst.cache_capacity_bits[c.k];
        if (used[c.k] + inst.size_bits[c.i] <= cap * (1.0 + kCapSlack)) {
            out.cache_flags(c.i, c.k) = 1;
            used[c.k] += inst.size_bits[c.i];
        }
    }
    return out;
}

std::pair<DecisionVars, InnerReport> reoptimize_continuous(const IntegerAssignment& assignment,
                                                           const ProblemInstance& inst,
                                                           const DecisionVars* warm_start,
                                                           const InnerOptions& opts) {
    validate_shapes(inst, assignment);
    const AssignmentCheck chk = check_assignment(inst, assignment);
    if (!chk.ok) {
        throw InfeasibleError("pinned assignment is infeasible: " + join_lines(chk.binding));
    }

    SmoothProblem prob;
    prob.n = inst.n_total;
    prob.lb.assign(inst.n_total, 0.0);
    prob.ub.assign(inst.n_total, 0.0); // everything off unless a pin or floor opens it

    for (std::size_t i = 0; i < inst.K1; ++i) {
        const std::ptrdiff_t kk = assignment.assoc1[i];
        if (kk == kUnassigned) continue;
        const auto k = static_cast<std::size_t>(kk);
        prob.lb[inst.ix1(i, k)] = prob.ub[inst.ix1(i, k)] = 1.0;
        prob.lb[inst.iy1(i, k)] = std::min(1.0, dl_floor(inst, i, k));
        prob.ub[inst.iy1(i, k)] = 1.0;
        if (assignment.cache_flags(i, k)) {
            prob.lb[inst.ic(i, k)] = prob.ub[inst.ic(i, k)] = 1.0;
        }
        if (inst.psi(i, k) > 0.0) {
            prob.lb[inst.ia(i, k)] = std::min(1.0, inst.psi(i, k));
            prob.ub[inst.ia(i, k)] = 1.0;
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        const std::ptrdiff_t kk = assignment.assoc2[j];
        if (kk == kUnassigned) continue;
        const auto k = static_cast<std::size_t>(kk);
        prob.lb[inst.ix2(j, k)] = prob.ub[inst.ix2(j, k)] = 1.0;
        prob.lb[inst.iy2(j, k)] = std::min(1.0, ul_floor_share(inst, j, k));
        prob.ub[inst.iy2(j, k)] = 1.0;
        prob.lb[inst.iz(j, k)] = std::min(1.0, cpu_floor_share(inst, j, k));
        prob.ub[inst.iz(j, k)] = 1.0;
    }

    auto live_row = [&prob](SparseRow row) {
        SparseRow out;
        out.bound = row.bound;
        for (std::size_t m = 0; m < row.idx.size(); ++m) {
            if (prob.ub[row.idx[m]] > 0.0) {
                out.idx.push_back(row.idx[m]);
                out.coef.push_back(row.coef[m]);
            }
        }
        return out;
    };
    {
        SparseRow dl, ul, pw;
        dl.bound = ul.bound = pw.bound = 1.0;
        std::vector<SparseRow> compute(inst.S);
        for (std::size_t i = 0; i < inst.K1; ++i) {
            for (std::size_t k = 0; k < inst.S; ++k) {
                dl.idx.push_back(inst.iy1(i, k));
                dl.coef.push_back(1.0);
                pw.idx.push_back(inst.ia(i, k));
                pw.coef.push_back(1.0);
            }
        }
        for (std::size_t j = 0; j < inst.K2; ++j) {
            for (std::size_t k = 0; k < inst.S; ++k) {
                ul.idx.push_back(inst.iy2(j, k));
                ul.coef.push_back(1.0);
                compute[k].idx.push_back(inst.iz(j, k));
                compute[k].coef.push_back(1.0);
                compute[k].bound = 1.0;
            }
        }
        for (SparseRow* r : {&dl, &ul, &pw}) {
            SparseRow live = live_row(*r);
            if (!live.idx.empty()) prob.projection_rows.push_back(std::move(live));
        }
        for (SparseRow& r : compute) {
            SparseRow live = live_row(r);
            if (!live.idx.empty()) prob.projection_rows.push_back(std::move(live));
        }
    }

    const ProblemInstance* pi = &inst;
    prob.eval = [pi](const double* v, double* g) {
        const double f = scaled_utility_and_gradient(*pi, v, g);
        for (std::size_t e = 0; e < pi->n_total; ++e) g[e] = -g[e];
        return -f;
    };

    std::vector<double> v(inst.n_total, 0.0);
    if (warm_start != nullptr) {
        v = flatten(inst, *warm_start);
    } else {
        for (std::size_t e = 0; e < inst.n_total; ++e) v[e] = 0.5 * (prob.lb[e] + prob.ub[e]);
    }
    for (std::size_t e = 0; e < inst.n_total; ++e) {
        v[e] = std::clamp(v[e], prob.lb[e], prob.ub[e]);
    }
    project_feasible(prob, v);

    InnerReport report = solve_projected_gradient(prob, v, opts);
    return {unflatten(inst, v), report};
}

RecoveryResult recover_solution(const ProblemInstance& inst, const DecisionVars& relaxed,
                                const InnerOptions& opts) {
    RecoveryResult result;
    result.assignment = round_assignment(relaxed, inst);

    // Relaxed per-user utilities drive which budget contributor to shed.
    std::vector<double> util1(inst.K1, 0.0), util2(inst.K2, 0.0);
    for (std::size_t i = 0; i < inst.K1; ++i) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            util1[i] += utility_service1(inst, i, k, relaxed.x1(i, k), relaxed.yt1(i, k),
                                         relaxed.ct(i, k), relaxed.at(i, k));
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            util2[j] += utility_service2(inst, j, k, relaxed.x2(j, k), relaxed.yt2(j, k),
                                         relaxed.zt(j, k));
        }
    }

    auto drop1 = [&](std::size_t i) {
        result.assignment.assoc1[i] = kUnassigned;
        for (std::size_t k = 0; k < inst.S; ++k) result.assignment.cache_flags(i, k) = 0;
        result.dropped1.push_back(i);
    };
    auto drop2 = [&](std::size_t j) {
        result.assignment.assoc2[j] = kUnassigned;
        result.dropped2.push_back(j);
    };

    // Each pass either unassigns at least one user or clears one cache flag, so
    // the loop ends after at most K1 + K2 drops plus K1 flag clears.
    const std::size_t max_rounds = 2 * inst.K1 + inst.K2 + 1;
    for (std::size_t round = 0;; ++round) {
        const AssignmentCheck chk = check_assignment(inst, result.assignment);
        if (chk.ok) break;
        if (round >= max_rounds) {
            throw InfeasibleError("integer recovery failed: " + join_lines(chk.binding));
        }
        if (!chk.infeasible1.empty() || !chk.infeasible2.empty()) {
            for (std::size_t i : chk.infeasible1) drop1(i);
            for (std::size_t j : chk.infeasible2) drop2(j);
            continue;
        }
        if (chk.budget == BudgetId::Cache) {
            // The greedy stays inside capacity, so this only triggers on a
            // hand-built assignment: clear the least valuable flag.
            std::size_t best_i = inst.K1;
            double best_ct = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < inst.K1; ++i) {
                if (!result.assignment.cache_flags(i, chk.budget_cell)) continue;
                if (relaxed.ct(i, chk.budget_cell) < best_ct) {
                    best_ct = relaxed.ct(i, chk.budget_cell);
                    best_i = i;
                }
            }
            if (best_i == inst.K1) {
                throw InfeasibleError("integer recovery failed: " + join_lines(chk.binding));
            }
            result.assignment.cache_flags(best_i, chk.budget_cell) = 0;
            continue;
        }
        const bool service1 =
            chk.budget == BudgetId::DlBand || chk.budget == BudgetId::BackhaulPower;
        std::size_t victim = service1 ? inst.K1 : inst.K2;
        double worst = std::numeric_limits<double>::infinity();
        if (service1) {
            for (std::size_t i = 0; i < inst.K1; ++i) {
                if (result.assignment.assoc1[i] == kUnassigned) continue;
                const auto k = static_cast<std::size_t>(result.assignment.assoc1[i]);
                if (chk.budget == BudgetId::BackhaulPower && inst.psi(i, k) <= 0.0) continue;
                if (util1[i] < worst) {
                    worst = util1[i];
                    victim = i;
                }
            }
            if (victim == inst.K1) {
                throw InfeasibleError("integer recovery failed: " + join_lines(chk.binding));
            }
            drop1(victim);
        } else {
            for (std::size_t j = 0; j < inst.K2; ++j) {
                if (result.assignment.assoc2[j] == kUnassigned) continue;
                if (chk.budget == BudgetId::Compute &&
                    static_cast<std::size_t>(result.assignment.assoc2[j]) != chk.budget_cell) {
                    continue;
                }
                if (util2[j] < worst) {
                    worst = util2[j];
                    victim = j;
                }
            }
            if (victim == inst.K2) {
                throw InfeasibleError("integer recovery failed: " + join_lines(chk.binding));
            }
            drop2(victim);
        }
    }

    auto [vars, report] = reoptimize_continuous(result.assignment, inst, &relaxed, opts);
    result.vars = std::move(vars);
    result.report = report;
    result.objective = objective(inst, result.vars);
    result.relaxed_objective = objective(inst, relaxed);
    result.integrality_gap = (result.relaxed_objective - result.objective) /
                             std::max(std::abs(result.relaxed_objective), 1e-12);
    return result;
}

ConstraintResiduals assigned_residuals(const ProblemInstance& inst, const DecisionVars& vars,
                                       const IntegerAssignment& assignment) {
    validate_shapes(inst, assignment);
    ConstraintResiduals res = constraint_residuals(inst, vars);
    auto bump = [](FamilyResidual& f, double raw, double denom) {
        f.raw = std::max(f.raw, raw);
        f.normalized = std::max(f.normalized, raw / denom);
    };
    res.c5 = FamilyResidual{};
    res.c8 = FamilyResidual{};
    res.c9 = FamilyResidual{};
    for (std::size_t i = 0; i < inst.K1; ++i) {
        if (assignment.assoc1[i] == kUnassigned) continue;
        double rate = 0.0;
        for (std::size_t k = 0; k < inst.S; ++k) {
            rate += vars.yt1(i, k) * inst.bd_hz * inst.r1(i, k);
        }
        bump(res.c5, inst.rate_req_bps[i] - rate, inst.rate_req_bps[i]);
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        if (assignment.assoc2[j] == kUnassigned) continue;
        double up = 0.0, cpu = 0.0;
        for (std::size_t k = 0; k < inst.S; ++k) {
            up += vars.yt2(j, k) * inst.bu_hz * inst.r2(j, k);
            cpu += vars.zt(j, k) * inst.mec_speed_cps[k];
        }
        bump(res.c8, inst.ul_floor_bps[j] - up, inst.ul_floor_bps[j]);
        bump(res.c9, inst.cpu_floor_cps[j] - cpu, inst.cpu_floor_cps[j]);
    }
    return res;
}

} // namespace fdmec
