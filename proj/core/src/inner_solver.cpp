#include "fdmec/inner_solver.hpp"

#include "fdmec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fdmec {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Membership change of one row member as the multiplier lambda grows:
// g(lambda) = sum_m coef clamp(v - lambda coef, lb, ub) is piecewise linear,
// and crossing a breakpoint adds (dC, dM) to its intercept and slope mass.
struct BreakEvent {
    double lam;
    double dC;
    double dM;
};

void validate_problem(const SmoothProblem& prob) {
    if (prob.n == 0) throw ValidationError("smooth problem has no variables");
    if (!prob.eval) throw ValidationError("smooth problem has no evaluator");
    if (prob.lb.size() != prob.n || prob.ub.size() != prob.n)
        throw ValidationError("smooth problem box bounds do not match the dimension");
    for (std::size_t i = 0; i < prob.n; ++i)
        if (!(prob.lb[i] <= prob.ub[i])) throw ValidationError("smooth problem has an empty box");
    std::vector<char> member(prob.n, 0);
    for (const auto& row : prob.projection_rows) {
        if (row.idx.size() != row.coef.size())
            throw ValidationError("projection row index/coefficient size mismatch");
        for (std::size_t m = 0; m < row.idx.size(); ++m) {
            if (row.idx[m] >= prob.n) throw ValidationError("projection row index out of range");
            if (!(row.coef[m] > 0.0))
                throw ValidationError("projection row coefficients must be positive");
            if (member[row.idx[m]])
                throw ValidationError("projection rows must be pairwise disjoint");
            member[row.idx[m]] = 1;
        }
    }
    for (const auto& row : prob.penalty_rows) {
        if (row.idx.size() != row.coef.size())
            throw ValidationError("penalty row index/coefficient size mismatch");
        double amax = 0.0;
        for (std::size_t m = 0; m < row.idx.size(); ++m) {
            if (row.idx[m] >= prob.n) throw ValidationError("penalty row index out of range");
            amax = std::max(amax, std::abs(row.coef[m]));
        }
        if (amax == 0.0) throw ValidationError("penalty row has all-zero coefficients");
    }
}

// Everything solve_projected_gradient precomputes once per call.  Penalty rows
// (each normalized by its max |coef|) are split into two flat groups: rows with
// exactly two nonzeros — the vast majority, mostly variable couplings — get a
// branch-light specialized sweep, and the rest live in one contiguous CSR
// block.  The augmented-Lagrangian sweep runs at least once per objective
// evaluation, so its memory layout dominates solve time.  Multipliers stay
// indexed by the original row order via the rid maps.
struct Workspace {
    std::vector<char> member; // variable sits in some projection row
    std::size_t pen_rows = 0;
    std::vector<std::size_t> p2_a, p2_b, p2_rid;
    std::vector<double> p2_ca, p2_cb, p2_bound;
    std::vector<std::size_t> gen_off, gen_idx, gen_rid;
    std::vector<double> gen_coef, gen_bound;
};

Workspace make_workspace(const SmoothProblem& prob) {
    Workspace ws;
    ws.member.assign(prob.n, 0);
    for (const auto& row : prob.projection_rows)
        for (std::size_t i : row.idx) ws.member[i] = 1;
    ws.pen_rows = prob.penalty_rows.size();
    ws.gen_off.push_back(0);
    for (std::size_t r = 0; r < prob.penalty_rows.size(); ++r) {
        const auto& row = prob.penalty_rows[r];
        double amax = 0.0;
        for (double c : row.coef) amax = std::max(amax, std::abs(c));
        if (row.idx.size() == 2) {
            ws.p2_a.push_back(row.idx[0]);
            ws.p2_b.push_back(row.idx[1]);
            ws.p2_ca.push_back(row.coef[0] / amax);
            ws.p2_cb.push_back(row.coef[1] / amax);
            ws.p2_bound.push_back(row.bound / amax);
            ws.p2_rid.push_back(r);
        } else {
            for (std::size_t m = 0; m < row.idx.size(); ++m) {
                ws.gen_idx.push_back(row.idx[m]);
                ws.gen_coef.push_back(row.coef[m] / amax);
            }
            ws.gen_bound.push_back(row.bound / amax);
            ws.gen_rid.push_back(r);
            ws.gen_off.push_back(ws.gen_idx.size());
        }
    }
    return ws;
}

void project_with_mask(const SmoothProblem& prob, const std::vector<char>& member,
                       std::vector<double>& v) {
    for (std::size_t i = 0; i < prob.n; ++i)
        if (!member[i]) v[i] = clamp(v[i], prob.lb[i], prob.ub[i]);
    for (const auto& row : prob.projection_rows) project_row(row, prob.lb, prob.ub, v);
}

} // namespace

const char* to_string(InnerStatus s) {
    switch (s) {
    case InnerStatus::Converged: return "converged";
    case InnerStatus::MaxIter: return "max-iter";
    case InnerStatus::Stalled: return "stalled";
    }
    return "unknown";
}

void project_row(const SparseRow& row, const std::vector<double>& lb,
                 const std::vector<double>& ub, std::vector<double>& v) {
    if (row.idx.empty()) {
        if (row.bound < 0.0) throw InfeasibleError("constant projection row is infeasible");
        return;
    }

    double clamped_sum = 0.0;
    double floor_sum = 0.0;
    for (std::size_t m = 0; m < row.idx.size(); ++m) {
        const std::size_t i = row.idx[m];
        clamped_sum += row.coef[m] * clamp(v[i], lb[i], ub[i]);
        floor_sum += row.coef[m] * lb[i];
    }
    if (clamped_sum <= row.bound) {
        for (std::size_t i : row.idx) v[i] = clamp(v[i], lb[i], ub[i]);
        return;
    }
    if (floor_sum > row.bound + 1e-12 * std::max(1.0, std::abs(row.bound)))
        throw InfeasibleError("projection row infeasible: lower bounds exceed the budget");

    // g(lambda) is continuous, non-increasing and piecewise linear: walk its
    // breakpoints once, keeping the intercept C and slope mass M of the current
    // segment, and solve C - lambda*M = bound inside the segment where it
    // crosses.  Scratch is reused across calls: projection runs a few times
    // per gradient step, so this must not allocate every time.
    static thread_local std::vector<BreakEvent> evs;
    evs.clear();
    evs.reserve(2 * row.idx.size());
    double C = 0.0, M = 0.0; // g(lambda) = C - lambda * M just right of 0
    for (std::size_t m = 0; m < row.idx.size(); ++m) {
        const std::size_t i = row.idx[m];
        const double w = row.coef[m];
        const double vi = v[i], l = lb[i], u = ub[i];
        const double bu = (vi - u) / w; // below bu the member clamps at ub
        const double bl = (vi - l) / w; // above bl the member clamps at lb
        if (bu > 0.0) evs.push_back({bu, w * vi - w * u, w * w});
        if (bl > 0.0) evs.push_back({bl, w * l - w * vi, -(w * w)});
        if (bl <= 0.0) {
            C += w * l;
        } else if (bu > 0.0) {
            C += w * u;
        } else {
            C += w * vi;
            M += w * w;
        }
    }
    std::sort(evs.begin(), evs.end(),
              [](const BreakEvent& a, const BreakEvent& b) { return a.lam < b.lam; });

    double prev = 0.0;
    double lambda = 0.0;
    bool found = false;
    for (const BreakEvent& e : evs) {
        if (C - e.lam * M <= row.bound) {
            lambda = (M > 1e-300) ? clamp((C - row.bound) / M, prev, e.lam) : prev;
            found = true;
            break;
        }
        C += e.dC;
        M += e.dM;
        prev = e.lam;
    }
    if (!found) lambda = prev;
    for (std::size_t m = 0; m < row.idx.size(); ++m) {
        const std::size_t i = row.idx[m];
        v[i] = clamp(v[i] - lambda * row.coef[m], lb[i], ub[i]);
    }
}

void project_feasible(const SmoothProblem& prob, std::vector<double>& v) {
    if (v.size() != prob.n) throw ValidationError("project_feasible: dimension mismatch");
    std::vector<char> member(prob.n, 0);
    for (const auto& row : prob.projection_rows)
        for (std::size_t i : row.idx) member[i] = 1;
    project_with_mask(prob, member, v);
}

double max_penalty_violation(const SmoothProblem& prob, const std::vector<double>& v) {
    double worst = 0.0;
    for (const auto& row : prob.penalty_rows) {
        double s = -row.bound, amax = 0.0;
        for (std::size_t m = 0; m < row.idx.size(); ++m) {
            s += row.coef[m] * v[row.idx[m]];
            amax = std::max(amax, std::abs(row.coef[m]));
        }
        if (amax > 0.0) worst = std::max(worst, s / amax);
    }
    return worst;
}

InnerReport solve_projected_gradient(const SmoothProblem& prob, std::vector<double>& v,
                                     const InnerOptions& opts,
                                     std::vector<double>* multipliers) {
    validate_problem(prob);
    if (v.size() != prob.n) throw ValidationError("solver start point has wrong dimension");
    const Workspace ws = make_workspace(prob);

    std::vector<double> own_mult;
    std::vector<double>& mult = multipliers ? *multipliers : own_mult;
    if (mult.size() != ws.pen_rows) mult.assign(ws.pen_rows, 0.0);

    double sigma = opts.sigma0;

    auto eval_full = [&](const std::vector<double>& x, std::vector<double>& g) {
        double f = prob.eval(x.data(), g.data());
        for (std::size_t r = 0; r < ws.p2_rid.size(); ++r) {
            const std::size_t ia = ws.p2_a[r], ib = ws.p2_b[r];
            const double ca = ws.p2_ca[r], cb = ws.p2_cb[r];
            const double s = ca * x[ia] + cb * x[ib] - ws.p2_bound[r];
            const double mu = mult[ws.p2_rid[r]];
            const double active = std::max(0.0, mu + sigma * s);
            f += (active * active - mu * mu) / (2.0 * sigma);
            if (active > 0.0) {
                g[ia] += active * ca;
                g[ib] += active * cb;
            }
        }
        const std::size_t* idx = ws.gen_idx.data();
        const double* coef = ws.gen_coef.data();
        for (std::size_t r = 0; r < ws.gen_rid.size(); ++r) {
            const std::size_t b = ws.gen_off[r], e = ws.gen_off[r + 1];
            double s = -ws.gen_bound[r];
            for (std::size_t m = b; m < e; ++m) s += coef[m] * x[idx[m]];
            const double mu = mult[ws.gen_rid[r]];
            const double active = std::max(0.0, mu + sigma * s);
            f += (active * active - mu * mu) / (2.0 * sigma);
            if (active > 0.0)
                for (std::size_t m = b; m < e; ++m) g[idx[m]] += active * coef[m];
        }
        if (!std::isfinite(f)) throw SolverError("solver objective became non-finite");
        for (std::size_t i = 0; i < prob.n; ++i)
            if (!std::isfinite(g[i]))
                throw SolverError("solver gradient became non-finite at index " +
                                  std::to_string(i));
        return f;
    };

    InnerReport rep;
    project_with_mask(prob, ws.member, v);

    std::vector<double> g(prob.n), g_new(prob.n), trial(prob.n), probe(prob.n);
    const std::size_t stages = (ws.pen_rows == 0) ? 1 : opts.max_outer;
    double prev_viol = std::numeric_limits<double>::infinity();
    bool stage_stalled = false;

    for (std::size_t outer = 0; outer < stages; ++outer) {
        rep.outer_iters = outer + 1;
        rep.objective_trace.clear();
        stage_stalled = false;

        double f = eval_full(v, g);
        rep.objective_trace.push_back(f);
        double step = 1.0 / std::max(1.0, std::abs(f));
        bool pg_ok = false;
        constexpr std::size_t kStallWindow = 20;

        for (std::size_t it = 0; it < opts.max_inner; ++it) {
            for (std::size_t i = 0; i < prob.n; ++i) probe[i] = v[i] - g[i];
            project_with_mask(prob, ws.member, probe);
            double res = 0.0;
            for (std::size_t i = 0; i < prob.n; ++i)
                res = std::max(res, std::abs(probe[i] - v[i]));
            rep.pg_residual = res;
            if (res <= opts.pg_tol) {
                pg_ok = true;
                break;
            }

            double t = step;
            double f_new = f;
            bool accepted = false;
            while (t >= 1e-18) {
                for (std::size_t i = 0; i < prob.n; ++i) trial[i] = v[i] - t * g[i];
                project_with_mask(prob, ws.member, trial);
                double descent = 0.0;
                for (std::size_t i = 0; i < prob.n; ++i) descent += g[i] * (trial[i] - v[i]);
                f_new = eval_full(trial, g_new);
                if (f_new <= f + opts.armijo_c * descent + 1e-12 * (1.0 + std::abs(f))) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                stage_stalled = true;
                break;
            }

            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < prob.n; ++i) {
                const double s = trial[i] - v[i];
                ss += s * s;
                sy += s * (g_new[i] - g[i]);
            }
            v.swap(trial);
            g.swap(g_new);
            f = f_new;
            rep.objective_trace.push_back(f);
            ++rep.inner_iters;
            if (ss == 0.0) {
                pg_ok = rep.pg_residual <= opts.pg_tol;
                break;
            }
            if (opts.stall_tol > 0.0 && rep.objective_trace.size() > kStallWindow) {
                const double window_gain =
                    rep.objective_trace[rep.objective_trace.size() - 1 - kStallWindow] - f;
                if (window_gain <= opts.stall_tol * kStallWindow * (1.0 + std::abs(f))) {
                    pg_ok = true;
                    break;
                }
            }
            step = (sy > 1e-16 * ss) ? clamp(ss / sy, 1e-12, 1e10) : std::min(step * 2.0, 1e10);
        }

        rep.objective = f;
        rep.sigma_final = sigma;
        if (ws.pen_rows == 0) {
            rep.max_violation = 0.0;
            rep.status = pg_ok ? InnerStatus::Converged
                               : (stage_stalled ? InnerStatus::Stalled : InnerStatus::MaxIter);
            return rep;
        }

        double viol = 0.0;
        for (std::size_t r = 0; r < ws.p2_rid.size(); ++r) {
            const double s =
                ws.p2_ca[r] * v[ws.p2_a[r]] + ws.p2_cb[r] * v[ws.p2_b[r]] - ws.p2_bound[r];
            const std::size_t rid = ws.p2_rid[r];
            mult[rid] = std::max(0.0, mult[rid] + sigma * s);
            viol = std::max(viol, s);
        }
        for (std::size_t r = 0; r < ws.gen_rid.size(); ++r) {
            double s = -ws.gen_bound[r];
            for (std::size_t m = ws.gen_off[r]; m < ws.gen_off[r + 1]; ++m)
                s += ws.gen_coef[m] * v[ws.gen_idx[m]];
            const std::size_t rid = ws.gen_rid[r];
            mult[rid] = std::max(0.0, mult[rid] + sigma * s);
            viol = std::max(viol, s);
        }
        rep.max_violation = viol;
        if (pg_ok && viol <= opts.feas_tol) {
            rep.status = InnerStatus::Converged;
            return rep;
        }
        if (viol > opts.feas_tol && viol > 0.25 * prev_viol)
            sigma = std::min(sigma * opts.sigma_growth, opts.sigma_max);
        prev_viol = viol;
        rep.sigma_final = sigma;
    }
    rep.status = stage_stalled ? InnerStatus::Stalled : InnerStatus::MaxIter;
    return rep;
}

SmoothProblem assemble_full_problem(const ProblemInstance& inst) {
    SmoothProblem p;
    p.n = inst.n_total;
    p.lb = inst.lb;
    p.ub = inst.ub;
    p.eval = [pi = &inst](const double* v, double* g) {
        const double f = scaled_utility_and_gradient(*pi, v, g);
        for (std::size_t i = 0; i < pi->n_total; ++i) g[i] = -g[i];
        return -f;
    };

    const std::size_t K1 = inst.K1, K2 = inst.K2, S = inst.S;
    auto push_row = [](std::vector<SparseRow>& dst, SparseRow row) {
        if (!row.idx.empty()) dst.push_back(std::move(row));
    };

    for (std::size_t i = 0; i < K1; ++i) {
        SparseRow row;
        for (std::size_t k = 0; k < S; ++k) {
            row.idx.push_back(inst.ix1(i, k));
            row.coef.push_back(1.0);
        }
        row.bound = 1.0;
        push_row(p.projection_rows, std::move(row));
    }
    for (std::size_t j = 0; j < K2; ++j) {
        SparseRow row;
        for (std::size_t k = 0; k < S; ++k) {
            row.idx.push_back(inst.ix2(j, k));
            row.coef.push_back(1.0);
        }
        row.bound = 1.0;
        push_row(p.projection_rows, std::move(row));
    }
    {
        SparseRow band_dl, band_ul, power;
        for (std::size_t i = 0; i < K1; ++i)
            for (std::size_t k = 0; k < S; ++k) {
                band_dl.idx.push_back(inst.iy1(i, k));
                band_dl.coef.push_back(1.0);
                if (inst.ub[inst.ia(i, k)] > 0.0) {
                    power.idx.push_back(inst.ia(i, k));
                    power.coef.push_back(1.0);
                }
            }
        for (std::size_t j = 0; j < K2; ++j)
            for (std::size_t k = 0; k < S; ++k) {
                band_ul.idx.push_back(inst.iy2(j, k));
                band_ul.coef.push_back(1.0);
            }
        band_dl.bound = band_ul.bound = power.bound = 1.0;
        push_row(p.projection_rows, std::move(band_dl));
        push_row(p.projection_rows, std::move(band_ul));
        push_row(p.projection_rows, std::move(power));
    }
    for (std::size_t k = 0; k < S; ++k) {
        SparseRow cache;
        double amax = 0.0;
        for (std::size_t i = 0; i < K1; ++i)
            if (inst.ub[inst.ic(i, k)] > 0.0) {
                cache.idx.push_back(inst.ic(i, k));
                cache.coef.push_back(inst.size_bits[i]);
                amax = std::max(amax, inst.size_bits[i]);
            }
        if (!cache.idx.empty()) {
            for (double& c : cache.coef) c /= amax;
            cache.bound = inst.cache_capacity_bits[k] / amax;
            p.projection_rows.push_back(std::move(cache));
        }
        SparseRow compute;
        for (std::size_t j = 0; j < K2; ++j) {
            compute.idx.push_back(inst.iz(j, k));
            compute.coef.push_back(1.0);
        }
        compute.bound = 1.0;
        push_row(p.projection_rows, std::move(compute));
    }

    for (std::size_t i = 0; i < K1; ++i) {
        SparseRow rate;
        for (std::size_t k = 0; k < S; ++k) {
            rate.idx.push_back(inst.iy1(i, k));
            rate.coef.push_back(-inst.bd_hz * inst.r1(i, k));
        }
        rate.bound = -inst.rate_req_bps[i];
        push_row(p.penalty_rows, std::move(rate));
        for (std::size_t k = 0; k < S; ++k) {
            if (inst.psi(i, k) > 0.0)
                p.penalty_rows.push_back(
                    {{inst.ix1(i, k), inst.ia(i, k)}, {inst.psi(i, k), -1.0}, 0.0});
            p.penalty_rows.push_back({{inst.iy1(i, k), inst.ix1(i, k)}, {1.0, -1.0}, 0.0});
            if (inst.ub[inst.ic(i, k)] > 0.0)
                p.penalty_rows.push_back({{inst.ic(i, k), inst.ix1(i, k)}, {1.0, -1.0}, 0.0});
            if (inst.ub[inst.ia(i, k)] > 0.0)
                p.penalty_rows.push_back({{inst.ia(i, k), inst.ix1(i, k)}, {1.0, -1.0}, 0.0});
        }
    }
    for (std::size_t j = 0; j < K2; ++j) {
        SparseRow up, cpu;
        for (std::size_t k = 0; k < S; ++k) {
            up.idx.push_back(inst.iy2(j, k));
            up.coef.push_back(-inst.bu_hz * inst.r2(j, k));
            cpu.idx.push_back(inst.iz(j, k));
            cpu.coef.push_back(-inst.mec_speed_cps[k]);
        }
        up.bound = -inst.ul_floor_bps[j];
        cpu.bound = -inst.cpu_floor_cps[j];
        push_row(p.penalty_rows, std::move(up));
        push_row(p.penalty_rows, std::move(cpu));
        for (std::size_t k = 0; k < S; ++k) {
            p.penalty_rows.push_back({{inst.iy2(j, k), inst.ix2(j, k)}, {1.0, -1.0}, 0.0});
            p.penalty_rows.push_back({{inst.iz(j, k), inst.ix2(j, k)}, {1.0, -1.0}, 0.0});
        }
    }
    return p;
}

std::vector<double> interior_point(const ProblemInstance& inst) {
    std::vector<double> v(inst.n_total, 0.0);
    const double S = static_cast<double>(inst.S);
    const double k1 = static_cast<double>(std::max<std::size_t>(1, inst.K1));
    const double k2 = static_cast<double>(std::max<std::size_t>(1, inst.K2));
    for (std::size_t i = 0; i < inst.K1; ++i)
        for (std::size_t k = 0; k < inst.S; ++k) {
            v[inst.ix1(i, k)] = 1.0 / (2.0 * S);
            v[inst.iy1(i, k)] = 1.0 / (2.0 * k1 * S);
            if (inst.ub[inst.ic(i, k)] > 0.0)
                v[inst.ic(i, k)] = std::min(
                    1.0 / (2.0 * S), inst.cache_capacity_bits[k] / (2.0 * k1 * inst.size_bits[i]));
            if (inst.ub[inst.ia(i, k)] > 0.0) v[inst.ia(i, k)] = 1.0 / (2.0 * k1 * S);
        }
    for (std::size_t j = 0; j < inst.K2; ++j)
        for (std::size_t k = 0; k < inst.S; ++k) {
            v[inst.ix2(j, k)] = 1.0 / (2.0 * S);
            v[inst.iy2(j, k)] = 1.0 / (2.0 * k2 * S);
            v[inst.iz(j, k)] = 1.0 / (2.0 * k2 * S);
        }
    for (std::size_t i = 0; i < inst.n_total; ++i)
        v[i] = std::min(v[i], inst.ub[i]);
    return v;
}

std::vector<double> blend_start(const ProblemInstance& inst, const DecisionVars& constructive) {
    std::vector<double> v = flatten(inst, constructive);
    const std::vector<double> u = interior_point(inst);
    for (std::size_t i = 0; i < inst.n_total; ++i) v[i] = 0.9 * v[i] + 0.1 * u[i];
    return v;
}

CentralizedResult solve_centralized(const ProblemInstance& inst, const InnerOptions& opts) {
    const ConstructiveResult cons = constructive_point(inst);
    if (!cons.ok)
        throw InfeasibleError("instance admits no constructive allocation: " + cons.reason);
    const SmoothProblem p = assemble_full_problem(inst);
    std::vector<double> v = blend_start(inst, cons.vars);
    CentralizedResult out;
    out.report = solve_projected_gradient(p, v, opts);
    out.vars = unflatten(inst, v);
    return out;
}

} // namespace fdmec
