#include "fdmec/admm.hpp"

#include "fdmec/errors.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fdmec {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

void check_shapes(const ProblemInstance& inst, const std::vector<LocalState>& locals,
                  const GlobalState& global, const DualState& duals) {
    if (locals.size() != inst.S || duals.m.size() != inst.S)
        throw ValidationError("consensus state must carry one copy per cell");
    if (global.v.size() != inst.n_total)
        throw ValidationError("global state has the wrong dimension");
    for (std::size_t k = 0; k < inst.S; ++k)
        if (locals[k].v.size() != inst.n_total || duals.m[k].size() != inst.n_total)
            throw ValidationError("local or dual state has the wrong dimension");
}

SmoothProblem assemble_local_problem(const ProblemInstance& inst, std::size_t k,
                                     const std::vector<double>* global,
                                     const std::vector<double>* dual_k, double rho) {
    SmoothProblem p = assemble_full_problem(inst);
    for (std::size_t i = 0; i < inst.K1; ++i)
        for (std::size_t n = 0; n < inst.S; ++n)
            if (n != k) p.ub[inst.ic(i, n)] = 0.0;
    p.eval = [pi = &inst, k, global, dual_k, rho](const double* v, double* g) {
        double f = -scaled_cell_utility_and_gradient(*pi, k, v, g);
        for (std::size_t e = 0; e < pi->n_total; ++e) g[e] = -g[e];
        for (std::size_t e = 0; e < pi->n_total; ++e) {
            if (!is_consensus_entry(*pi, e)) continue;
            const double d = v[e] - (*global)[e];
            f += (*dual_k)[e] * d + 0.5 * rho * d * d;
            g[e] += (*dual_k)[e] + rho * d;
        }
        return f;
    };
    return p;
}

} // namespace

bool is_consensus_entry(const ProblemInstance& inst, std::size_t e) {
    return e < inst.oc || e >= inst.oc + inst.K1 * inst.S;
}

double augmented_lagrangian(const ProblemInstance& inst, const std::vector<LocalState>& locals,
                            const GlobalState& global, const DualState& duals, double rho,
                            double phi_tol) {
    check_shapes(inst, locals, global, duals);
    double value = 0.0;
    for (std::size_t k = 0; k < inst.S; ++k) {
        const DecisionVars vars = unflatten(inst, locals[k].v);
        if (constraint_residuals(inst, vars).max_normalized() > phi_tol)
            return std::numeric_limits<double>::infinity();
        value -= scaled_cell_utility_and_gradient(inst, k, locals[k].v.data(), nullptr);
        for (std::size_t e = 0; e < inst.n_total; ++e) {
            if (!is_consensus_entry(inst, e)) continue;
            const double d = locals[k].v[e] - global.v[e];
            value += duals.m[k][e] * d + 0.5 * rho * d * d;
        }
    }
    return value;
}

InnerReport local_update(const ProblemInstance& inst, std::size_t k, LocalState& local,
                         const GlobalState& global, const std::vector<double>& dual_k,
                         double rho, const InnerOptions& opts, std::vector<double>* al_mult) {
    if (k >= inst.S) throw ValidationError("local_update: cell out of range");
    if (local.v.size() != inst.n_total || global.v.size() != inst.n_total ||
        dual_k.size() != inst.n_total)
        throw ValidationError("local_update: state dimension mismatch");
    const SmoothProblem p = assemble_local_problem(inst, k, &global.v, &dual_k, rho);
    try {
        return solve_projected_gradient(p, local.v, opts, al_mult);
    } catch (const SolverError& e) {
        throw SolverError("local update for cell " + std::to_string(k) + " failed: " + e.what());
    }
}

GlobalState global_update(const ProblemInstance& inst, const std::vector<LocalState>& locals,
                          const DualState& duals, double rho) {
    if (!(rho > 0.0)) throw ValidationError("global_update: rho must be positive");
    GlobalState g;
    g.v.assign(inst.n_total, 0.0);
    check_shapes(inst, locals, g, duals);
    const double inv_s = 1.0 / static_cast<double>(inst.S);
    for (std::size_t e = 0; e < inst.n_total; ++e) {
        if (!is_consensus_entry(inst, e)) continue;
        double mean = 0.0;
        for (std::size_t k = 0; k < inst.S; ++k)
            mean += locals[k].v[e] + duals.m[k][e] / rho;
        g.v[e] = clamp(mean * inv_s, inst.lb[e], inst.ub[e]);
    }
    for (std::size_t k = 0; k < inst.S; ++k)
        for (std::size_t i = 0; i < inst.K1; ++i)
            g.v[inst.ic(i, k)] = locals[k].v[inst.ic(i, k)];
    return g;
}

void dual_update(const ProblemInstance& inst, DualState& duals,
                 const std::vector<LocalState>& locals, const GlobalState& global, double rho) {
    check_shapes(inst, locals, global, duals);
    for (std::size_t k = 0; k < inst.S; ++k)
        for (std::size_t e = 0; e < inst.n_total; ++e)
            if (is_consensus_entry(inst, e))
                duals.m[k][e] += rho * (locals[k].v[e] - global.v[e]);
}

bool residuals_diverging(const std::vector<double>& trace, std::size_t window, double factor,
                         double ignore_below) {
    // Compare short moving averages `window` iterations apart rather than raw
    // samples: converging runs wobble an order of magnitude around their
    // trend, and a dip-then-spike pair must not read as divergence.
    constexpr std::size_t kSmooth = 10;
    if (trace.size() < window + kSmooth) return false;
    double now = 0.0, then = 0.0;
    const std::size_t end = trace.size();
    for (std::size_t j = 0; j < kSmooth; ++j) {
        now += trace[end - 1 - j];
        then += trace[end - 1 - window - j];
    }
    now /= static_cast<double>(kSmooth);
    then /= static_cast<double>(kSmooth);
    return now > ignore_below && now > factor * then;
}

SolveReport admm_solve(const ProblemInstance& inst, const AdmmConfig& config) {
    if (!(config.rho > 0.0)) throw ValidationError("admm config: rho must be positive");
    if (config.max_iter == 0) throw ValidationError("admm config: max_iter must be positive");

    const ConstructiveResult cons = constructive_point(inst);
    if (!cons.ok)
        throw InfeasibleError("instance admits no constructive allocation: " + cons.reason);
    const std::vector<double> start = blend_start(inst, cons.vars);

    const std::size_t S = inst.S;
    std::vector<LocalState> locals(S);
    DualState duals;
    duals.m.assign(S, std::vector<double>(inst.n_total, 0.0));
    for (std::size_t k = 0; k < S; ++k) {
        locals[k].v = start;
        for (std::size_t i = 0; i < inst.K1; ++i)
            for (std::size_t n = 0; n < S; ++n)
                if (n != k) locals[k].v[inst.ic(i, n)] = 0.0;
    }
    GlobalState global;
    global.v = start;

    const std::size_t cons_per_copy = inst.n_total - inst.K1 * S;
    const double tol_primal = config.tol_primal > 0.0
                                  ? config.tol_primal
                                  : 1e-4 * std::sqrt(static_cast<double>(S * cons_per_copy));
    const double tol_dual = config.tol_dual > 0.0
                                ? config.tol_dual
                                : 1e-4 * std::sqrt(static_cast<double>(S * cons_per_copy));

    double rho_eff = config.rho;
    std::vector<std::vector<double>> al_mults(S);
    std::vector<double> sigmas(S, config.inner.sigma0);
    double last_primal = std::numeric_limits<double>::infinity();
    double best_primal = std::numeric_limits<double>::infinity();
    double sigma_cap = std::min(2e3, config.inner.sigma_max);
    bool rho_frozen = false;
    SolveReport rep;
    rep.termination = "max-iter";

    for (std::size_t t = 0; t < config.max_iter; ++t) {
        // With a single cell the first pass already solves the whole problem,
        // so dropping the proximal term there makes consensus exact in one
        // round. With several cells that unconstrained first pass lets every
        // cell claim the shared budgets outright, and the extra disagreement
        // costs more iterations than the free start saves.
        const double rho_local = (t == 0 && S == 1) ? 0.0 : rho_eff;
        // Each cell's penalty weight and multipliers carry over between
        // iterations, so warm restarts need one or two multiplier stages
        // instead of re-growing sigma from scratch. The subproblem tolerance
        // tracks the consensus residual: solving locals far below the current
        // disagreement buys nothing.
        InnerOptions local_opts = config.inner;
        if (S > 1) {
            const double target = std::isfinite(last_primal) ? 0.02 * last_primal : 1e-3;
            local_opts.pg_tol = clamp(target, config.inner.pg_tol, 1e-3);
            // Feasibility cannot be certified tighter than the solve
            // precision; demanding more only ratchets the penalty weight.
            local_opts.feas_tol = std::max(config.inner.feas_tol, local_opts.pg_tol);
            // Soft penalty cap while disagreement is large, full stiffness as
            // the residual nears tolerance: gradient steps shrink with the
            // penalty curvature, so early precision is wasted effort. The cap
            // only ratchets upward (at most doubling per iteration) — letting
            // it track the residual both ways makes the local optima chase the
            // penalty weight and feeds the wobble it reacts to.
            if (std::isfinite(best_primal)) {
                const double want = config.inner.sigma_max * (3.0 * tol_primal / best_primal);
                sigma_cap = clamp(want, sigma_cap, std::min(2.0 * sigma_cap, config.inner.sigma_max));
            }
            local_opts.sigma_max = sigma_cap;
        }
        for (std::size_t k = 0; k < S; ++k) {
            local_opts.sigma0 = std::min(sigmas[k], local_opts.sigma_max);
            const InnerReport r = local_update(inst, k, locals[k], global, duals.m[k], rho_local,
                                               local_opts, &al_mults[k]);
            sigmas[k] = clamp(r.sigma_final, config.inner.sigma0, config.inner.sigma_max);
            rep.inner_iterations += r.inner_iters;
        }

        const GlobalState prev = global;
        if (config.relaxation != 1.0) {
            // Blend each copy with the previous consensus before the averaging
            // and dual steps; weights above one extrapolate past the copy.
            std::vector<LocalState> blended = locals;
            for (std::size_t e = 0; e < inst.n_total; ++e) {
                if (!is_consensus_entry(inst, e)) continue;
                for (std::size_t k = 0; k < S; ++k)
                    blended[k].v[e] = config.relaxation * locals[k].v[e] +
                                      (1.0 - config.relaxation) * prev.v[e];
            }
            global = global_update(inst, blended, duals, rho_eff);
            dual_update(inst, duals, blended, global, rho_eff);
        } else {
            global = global_update(inst, locals, duals, rho_eff);
            dual_update(inst, duals, locals, global, rho_eff);
        }

        double primal_sq = 0.0, shift_sq = 0.0, dual_sum = 0.0;
        for (std::size_t e = 0; e < inst.n_total; ++e) {
            if (!is_consensus_entry(inst, e)) continue;
            double sum_e = 0.0;
            for (std::size_t k = 0; k < S; ++k) {
                const double d = locals[k].v[e] - global.v[e];
                primal_sq += d * d;
                sum_e += duals.m[k][e];
            }
            dual_sum = std::max(dual_sum, std::abs(sum_e));
            const double s = global.v[e] - prev.v[e];
            shift_sq += s * s;
        }
        const double primal = std::sqrt(primal_sq);
        const double dual_res = rho_eff * std::sqrt(shift_sq);
        last_primal = primal;
        best_primal = std::min(best_primal, primal);
        rep.max_dual_sum = std::max(rep.max_dual_sum, dual_sum);

        rep.vars = unflatten(inst, global.v);
        rep.objective_trace.push_back(objective(inst, rep.vars));
        rep.primal_trace.push_back(primal);
        rep.dual_trace.push_back(dual_res);
        rep.iterations = t + 1;

        const double assembled = constraint_residuals(inst, rep.vars).max_normalized();
        if (primal <= tol_primal && dual_res <= tol_dual && assembled <= config.assembled_tol) {
            rep.termination = "converged";
            break;
        }
        // Transient bumps are part of inexact consensus; only growth past the
        // run's opening disagreement is treated as real divergence.
        const double guard_floor = std::max(100.0 * tol_primal, rep.primal_trace.front());
        if (residuals_diverging(rep.primal_trace, 50, 10.0, guard_floor))
            throw SolverError("consensus residual grew 10x over 50 iterations; adjust rho (now " +
                              std::to_string(rho_eff) + ")");
        // Freeze the penalty for good once both residuals get near tolerance:
        // each weight change moves every cell's proximal optimum, and that
        // kick is what keeps the tail orbiting instead of settling.
        if (primal < 5.0 * tol_primal && dual_res < 5.0 * tol_dual) rho_frozen = true;
        if (config.residual_balancing && t >= 1 && !rho_frozen) {
            if (primal > 10.0 * dual_res)
                rho_eff = std::min(rho_eff * 2.0, 1e8);
            else if (dual_res > 10.0 * primal)
                rho_eff = std::max(rho_eff * 0.5, 1e-8);
        }
    }
    rep.rho_final = rho_eff;
    return rep;
}

std::string report_to_json(const SolveReport& report) {
    nlohmann::json j;
    j["objective_trace"] = report.objective_trace;
    j["primal_trace"] = report.primal_trace;
    j["dual_trace"] = report.dual_trace;
    j["termination"] = report.termination;
    j["iterations"] = report.iterations;
    j["inner_iterations"] = report.inner_iterations;
    j["rho_final"] = report.rho_final;
    j["max_dual_sum"] = report.max_dual_sum;
    nlohmann::json v;
    to_json(v["x1"], report.vars.x1);
    to_json(v["yt1"], report.vars.yt1);
    to_json(v["ct"], report.vars.ct);
    to_json(v["at"], report.vars.at);
    to_json(v["x2"], report.vars.x2);
    to_json(v["yt2"], report.vars.yt2);
    to_json(v["zt"], report.vars.zt);
    j["vars"] = std::move(v);
    return j.dump(2);
}

} // namespace fdmec
