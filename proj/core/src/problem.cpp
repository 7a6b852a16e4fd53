#include "fdmec/problem.hpp"

#include "fdmec/channel.hpp"
#include "fdmec/errors.hpp"
#include "fdmec/perspective.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>

namespace fdmec {

namespace {

constexpr double kPad = 1e-9;       // relative slack applied to tight floors
constexpr double kBudgetEps = 1e-12;

struct Pair1Eval {
    double u, gx, gy, gc, ga;
};

struct Pair2Eval {
    double u, gx, gy, gz;
};

// Scaled service-I utility for one (user, cell) pair at substituted variables.
Pair1Eval pair1_eval(const ProblemInstance& inst, std::size_t i, std::size_t k,
                     double x, double y, double c, double a) {
    const double A = inst.cA[i];
    const double B = inst.cB[i];
    const double L = inst.L1(i, k);
    const double vp = inst.vprime(i, k);
    const double uncached = inst.hit(i, k) ? 0.0 : 1.0;
    const double cache_cost = inst.caching_enabled ? inst.cHs[i] * uncached : 0.0;
    const double power_cost = inst.fd_enabled ? inst.cE[i] * uncached : 0.0;

    const PhiEval p1 = phi_perspective(x, y);
    const PhiEval p2 = phi_perspective(x, y + c * vp);

    Pair1Eval out;
    out.u = A * (p1.value + x * L) + B * (p2.value + x * L) - inst.cG[i] * y -
            cache_cost * c - power_cost * a;
    out.gx = A * (p1.dx + L) + B * (p2.dx + L);
    out.gy = A * p1.dw + B * p2.dw - inst.cG[i];
    out.gc = B * p2.dw * vp - cache_cost;
    out.ga = -power_cost;
    return out;
}

Pair2Eval pair2_eval(const ProblemInstance& inst, std::size_t j, std::size_t k,
                     double x, double y, double z) {
    const double P = inst.cP[j];
    const double L = inst.L2(j, k);
    const double vz = inst.cVth[j] * inst.mec_speed_cps[k];

    const PhiEval p = phi_perspective(x, y);

    Pair2Eval out;
    out.u = P * (p.value + x * L) + inst.cT[j] * x - inst.cF[j] * y - vz * z;
    out.gx = P * (p.dx + L) + inst.cT[j];
    out.gy = P * p.dw - inst.cF[j];
    out.gz = -vz;
    return out;
}

void require_nonnegative(std::initializer_list<double> vals, const char* where) {
    for (double v : vals)
        if (!(v >= 0.0)) throw ValidationError(std::string(where) + ": negative or non-finite argument");
}

void bump(FamilyResidual& f, double raw, double denom) {
    f.raw = std::max(f.raw, raw);
    f.normalized = std::max(f.normalized, raw / denom);
}

} // namespace

ProblemInstance build_instance(const Scenario& sc) {
    const std::size_t K1 = sc.users1.size();
    const std::size_t K2 = sc.users2.size();
    const std::size_t S = sc.cells.size();
    if (S == 0) throw ValidationError("build_instance: scenario has no cells");
    if (K1 + K2 == 0) throw ValidationError("build_instance: scenario has no users");
    if (sc.gains1.rows() != K1 || sc.gains1.cols() != S || sc.gains2.rows() != K2 ||
        sc.gains2.cols() != S || sc.mbs_gain.size() != S || sc.hit.rows() != K1 ||
        sc.hit.cols() != S)
        throw ValidationError("build_instance: gain/hit table dimensions disagree with entity counts");

    ProblemInstance inst;
    inst.K1 = K1;
    inst.K2 = K2;
    inst.S = S;
    inst.bd_hz = sc.radio.dl_bandwidth_hz;
    inst.bu_hz = sc.radio.ul_bandwidth_hz;
    inst.mbs_power_w = sc.radio.mbs_total_power_w;
    inst.noise_w = sc.radio.noise_power_w;
    inst.fd_enabled = sc.fd_enabled;
    inst.caching_enabled = sc.caching_enabled;

    inst.r1 = Matrix<double>(K1, S);
    inst.psi = Matrix<double>(K1, S);
    inst.hit = sc.hit;
    inst.vprime = Matrix<double>(K1, S);
    inst.L1 = Matrix<double>(K1, S);
    inst.r2 = Matrix<double>(K2, S);
    inst.L2 = Matrix<double>(K2, S);

    const double p_dl = sc.radio.sbs_tx_power_w;
    const double p_ul = sc.radio.ue_tx_power_w;

    for (std::size_t i = 0; i < K1; ++i) {
        const auto& u = sc.users1[i];
        if (u.requested_content >= sc.catalog.popularity.size())
            throw ValidationError("build_instance: requested content rank outside catalog");
        inst.rate_req_bps.push_back(u.rate_requirement_bps);
        inst.size_bits.push_back(sc.catalog.sizes_bits[u.requested_content]);
        inst.value_bits.push_back(sc.catalog.popularity[u.requested_content] *
                                  sc.catalog.sizes_bits[u.requested_content]);
        inst.coeffs1.push_back(u.coeffs);
        for (std::size_t k = 0; k < S; ++k) {
            double r = access_spectral_efficiency(p_dl, LinkGain{sc.gains1(i, k)},
                                                  sc.radio.noise_power_w);
            const bool cached = sc.hit(i, k) != 0;
            if (!sc.fd_enabled && !cached) r *= sc.hd_rate_factor;
            inst.r1(i, k) = r;
            inst.L1(i, k) = std::log(inst.bd_hz * r);
            if (sc.fd_enabled && !cached) {
                inst.psi(i, k) = p_dl * sc.gains1(i, k) *
                                 (sc.radio.residual_si_gain * p_dl + sc.radio.noise_power_w) /
                                 (sc.radio.mbs_total_power_w * sc.mbs_gain[k] *
                                  sc.radio.noise_power_w);
            } else {
                inst.psi(i, k) = 0.0;
            }
            inst.vprime(i, k) = (sc.caching_enabled && !cached)
                                    ? inst.value_bits[i] / (inst.bd_hz * r)
                                    : 0.0;
        }
    }
    for (std::size_t j = 0; j < K2; ++j) {
        const auto& u = sc.users2[j];
        inst.coeffs2.push_back(u.coeffs);
        inst.tasks.push_back(u.task);
        inst.ul_floor_bps.push_back(u.task.input_bits / u.task.uplink_deadline_s);
        inst.cpu_floor_cps.push_back(u.task.cpu_cycles /
                                     (u.task.deadline_s - u.task.uplink_deadline_s));
        for (std::size_t k = 0; k < S; ++k) {
            const double r = access_spectral_efficiency(p_ul, LinkGain{sc.gains2(j, k)},
                                                        sc.radio.noise_power_w);
            inst.r2(j, k) = r;
            inst.L2(j, k) = std::log(inst.bu_hz * r);
        }
    }
    for (const auto& cell : sc.cells) {
        inst.mec_speed_cps.push_back(cell.mec_speed_cps);
        inst.cache_capacity_bits.push_back(cell.cache_capacity_bits);
    }

    for (std::size_t i = 0; i < K1; ++i) {
        const auto& c = inst.coeffs1[i];
        inst.cA.push_back(c.alpha / inst.scale);
        inst.cB.push_back(c.beta / inst.scale);
        inst.cG.push_back(c.gamma * inst.bd_hz / inst.scale);
        inst.cHs.push_back(c.eta_per_bit * inst.size_bits[i] / inst.scale);
        inst.cE.push_back(c.epsilon * inst.mbs_power_w / inst.scale);
    }
    for (std::size_t j = 0; j < K2; ++j) {
        const auto& c = inst.coeffs2[j];
        const auto& t = inst.tasks[j];
        inst.cP.push_back(c.psi / inst.scale);
        inst.cT.push_back(c.theta * local_exec_time(t) * t.local_power_w / inst.scale);
        inst.cF.push_back(c.phi * inst.bu_hz / inst.scale);
        inst.cVth.push_back(c.vartheta_per_cps / inst.scale);
    }

    inst.ox1 = 0;
    inst.oy1 = inst.ox1 + K1 * S;
    inst.oc = inst.oy1 + K1 * S;
    inst.oa = inst.oc + K1 * S;
    inst.ox2 = inst.oa + K1 * S;
    inst.oy2 = inst.ox2 + K2 * S;
    inst.oz = inst.oy2 + K2 * S;
    inst.n_total = inst.oz + K2 * S;

    inst.lb.assign(inst.n_total, 0.0);
    inst.ub.assign(inst.n_total, 1.0);
    for (std::size_t i = 0; i < K1; ++i) {
        for (std::size_t k = 0; k < S; ++k) {
            const bool cached = inst.hit(i, k) != 0;
            if (cached || !inst.caching_enabled) inst.ub[inst.ic(i, k)] = 0.0;
            if (cached || !inst.fd_enabled) inst.ub[inst.ia(i, k)] = 0.0;
        }
    }
    return inst;
}

double utility_service1(const ProblemInstance& inst, std::size_t i, std::size_t k,
                        double x, double yt, double ct, double at) {
    require_nonnegative({x, yt, ct, at}, "utility_service1");
    return inst.scale * pair1_eval(inst, i, k, x, yt, ct, at).u;
}

double utility_service2(const ProblemInstance& inst, std::size_t j, std::size_t k,
                        double x, double yt, double zt) {
    require_nonnegative({x, yt, zt}, "utility_service2");
    return inst.scale * pair2_eval(inst, j, k, x, yt, zt).u;
}

double scaled_utility_and_gradient(const ProblemInstance& inst, const double* v, double* grad) {
    double total = 0.0;
    for (std::size_t i = 0; i < inst.K1; ++i) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            const std::size_t px = inst.ix1(i, k), py = inst.iy1(i, k), pc = inst.ic(i, k),
                              pa = inst.ia(i, k);
            const Pair1Eval e = pair1_eval(inst, i, k, v[px], v[py], v[pc], v[pa]);
            total += e.u;
            if (grad) {
                grad[px] = e.gx;
                grad[py] = e.gy;
                grad[pc] = e.gc;
                grad[pa] = e.ga;
            }
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            const std::size_t px = inst.ix2(j, k), py = inst.iy2(j, k), pz = inst.iz(j, k);
            const Pair2Eval e = pair2_eval(inst, j, k, v[px], v[py], v[pz]);
            total += e.u;
            if (grad) {
                grad[px] = e.gx;
                grad[py] = e.gy;
                grad[pz] = e.gz;
            }
        }
    }
    return total;
}

double scaled_utility(const ProblemInstance& inst, const double* v) {
    return scaled_utility_and_gradient(inst, v, nullptr);
}

double scaled_cell_utility_and_gradient(const ProblemInstance& inst, std::size_t k,
                                        const double* v, double* grad) {
    if (k >= inst.S) throw ValidationError("scaled_cell_utility_and_gradient: cell out of range");
    if (grad) std::fill(grad, grad + inst.n_total, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < inst.K1; ++i) {
        const std::size_t px = inst.ix1(i, k), py = inst.iy1(i, k), pc = inst.ic(i, k),
                          pa = inst.ia(i, k);
        const Pair1Eval e = pair1_eval(inst, i, k, v[px], v[py], v[pc], v[pa]);
        total += e.u;
        if (grad) {
            grad[px] = e.gx;
            grad[py] = e.gy;
            grad[pc] = e.gc;
            grad[pa] = e.ga;
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        const std::size_t px = inst.ix2(j, k), py = inst.iy2(j, k), pz = inst.iz(j, k);
        const Pair2Eval e = pair2_eval(inst, j, k, v[px], v[py], v[pz]);
        total += e.u;
        if (grad) {
            grad[px] = e.gx;
            grad[py] = e.gy;
            grad[pz] = e.gz;
        }
    }
    return total;
}

double objective(const ProblemInstance& inst, const DecisionVars& vars) {
    const std::vector<double> v = flatten(inst, vars);
    return inst.scale * scaled_utility(inst, v.data());
}

ConstraintResiduals constraint_residuals(const ProblemInstance& inst, const DecisionVars& vars) {
    ConstraintResiduals res;
    const std::size_t K1 = inst.K1, K2 = inst.K2, S = inst.S;

    double sum_y1 = 0.0, sum_y2 = 0.0, sum_a = 0.0;
    for (std::size_t i = 0; i < K1; ++i) {
        double row_x = 0.0, rate = 0.0;
        for (std::size_t k = 0; k < S; ++k) {
            row_x += vars.x1(i, k);
            rate += vars.yt1(i, k) * inst.bd_hz * inst.r1(i, k);
            sum_y1 += vars.yt1(i, k);
            if (!inst.hit(i, k)) sum_a += vars.at(i, k);
            const double psi = inst.psi(i, k);
            bump(res.c6, vars.x1(i, k) * psi - vars.at(i, k), std::max(1.0, psi));
            bump(res.coupling, vars.yt1(i, k) - vars.x1(i, k), 1.0);
            bump(res.coupling, vars.ct(i, k) - vars.x1(i, k), 1.0);
            bump(res.coupling, vars.at(i, k) - vars.x1(i, k), 1.0);
            if (inst.hit(i, k) || !inst.caching_enabled) bump(res.coupling, vars.ct(i, k), 1.0);
            if (inst.hit(i, k) || !inst.fd_enabled) bump(res.coupling, vars.at(i, k), 1.0);
        }
        bump(res.c1, row_x - 1.0, 1.0);
        bump(res.c5, inst.rate_req_bps[i] - rate, inst.rate_req_bps[i]);
    }
    for (std::size_t j = 0; j < K2; ++j) {
        double row_x = 0.0, ul = 0.0, cpu = 0.0;
        for (std::size_t k = 0; k < S; ++k) {
            row_x += vars.x2(j, k);
            ul += vars.yt2(j, k) * inst.bu_hz * inst.r2(j, k);
            cpu += vars.zt(j, k) * inst.mec_speed_cps[k];
            sum_y2 += vars.yt2(j, k);
            bump(res.coupling, vars.yt2(j, k) - vars.x2(j, k), 1.0);
            bump(res.coupling, vars.zt(j, k) - vars.x2(j, k), 1.0);
        }
        bump(res.c2, row_x - 1.0, 1.0);
        bump(res.c8, inst.ul_floor_bps[j] - ul, inst.ul_floor_bps[j]);
        bump(res.c9, inst.cpu_floor_cps[j] - cpu, inst.cpu_floor_cps[j]);
    }
    for (std::size_t k = 0; k < S; ++k) {
        double cache_bits = 0.0, z_col = 0.0;
        for (std::size_t i = 0; i < K1; ++i) cache_bits += vars.ct(i, k) * inst.size_bits[i];
        for (std::size_t j = 0; j < K2; ++j) z_col += vars.zt(j, k);
        bump(res.c10, cache_bits - inst.cache_capacity_bits[k], inst.cache_capacity_bits[k]);
        bump(res.c11, z_col - 1.0, 1.0);
    }
    bump(res.c3, sum_y1 - 1.0, 1.0);
    bump(res.c4, sum_y2 - 1.0, 1.0);
    if (inst.fd_enabled) bump(res.c7, sum_a - 1.0, 1.0);

    const std::vector<double> flat = flatten(inst, vars);
    for (double x : flat) {
        bump(res.bounds, -x, 1.0);
        bump(res.bounds, x - 1.0, 1.0);
    }
    return res;
}

double ConstraintResiduals::max_normalized() const {
    const FamilyResidual* fams[] = {&c1, &c2, &c3, &c4,  &c5,      &c6,    &c7,
                                    &c8, &c9, &c10, &c11, &coupling, &bounds};
    double m = -std::numeric_limits<double>::infinity();
    for (const auto* f : fams) m = std::max(m, f->normalized);
    return m;
}

double ConstraintResiduals::max_raw() const {
    const FamilyResidual* fams[] = {&c1, &c2, &c3, &c4,  &c5,      &c6,    &c7,
                                    &c8, &c9, &c10, &c11, &coupling, &bounds};
    double m = -std::numeric_limits<double>::infinity();
    for (const auto* f : fams) m = std::max(m, f->raw);
    return m;
}

OriginalVars recover_original(const ProblemInstance& inst, const DecisionVars& vars,
                              double x_threshold) {
    OriginalVars out;
    out.y1 = Matrix<double>(inst.K1, inst.S);
    out.c = Matrix<double>(inst.K1, inst.S);
    out.a = Matrix<double>(inst.K1, inst.S);
    out.y2 = Matrix<double>(inst.K2, inst.S);
    out.z = Matrix<double>(inst.K2, inst.S);
    for (std::size_t i = 0; i < inst.K1; ++i) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            const double x = vars.x1(i, k);
            if (x > x_threshold) {
                out.y1(i, k) = vars.yt1(i, k) / x;
                out.c(i, k) = vars.ct(i, k) / x;
                out.a(i, k) = vars.at(i, k) / x;
            }
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            const double x = vars.x2(j, k);
            if (x > x_threshold) {
                out.y2(j, k) = vars.yt2(j, k) / x;
                out.z(j, k) = vars.zt(j, k) / x;
            }
        }
    }
    return out;
}

double saved_backhaul(const ProblemInstance& inst, const DecisionVars& vars) {
    double total = 0.0;
    for (std::size_t i = 0; i < inst.K1; ++i)
        for (std::size_t k = 0; k < inst.S; ++k) {
            const double uncached = inst.hit(i, k) ? 0.0 : 1.0;
            total += vars.yt1(i, k) * inst.bd_hz * inst.r1(i, k) +
                     vars.ct(i, k) * uncached * inst.value_bits[i];
        }
    return total;
}

ConstructiveResult constructive_point(const ProblemInstance& inst) {
    ConstructiveResult out;
    out.vars = zero_vars(inst);
    const std::size_t K1 = inst.K1, K2 = inst.K2, S = inst.S;

    // Service I: best serviceable cell per user, minimal shares on the floors.
    std::vector<std::size_t> pick(K1, S);
    std::vector<double> need_y(K1, 0.0);
    auto y_req = [&](std::size_t i, std::size_t k) {
        return inst.rate_req_bps[i] / (inst.bd_hz * inst.r1(i, k)) * (1.0 + kPad);
    };
    for (std::size_t i = 0; i < K1; ++i) {
        double best_r = -1.0;
        for (std::size_t k = 0; k < S; ++k) {
            if (y_req(i, k) > 1.0 || inst.psi(i, k) > 1.0) continue;
            if (inst.r1(i, k) > best_r) {
                best_r = inst.r1(i, k);
                pick[i] = k;
            }
        }
        if (pick[i] == S) {
            out.reason = "service-I user " + std::to_string(i) + " has no serviceable cell";
            return out;
        }
        need_y[i] = y_req(i, pick[i]);
    }
    auto power_sum = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < K1; ++i) s += inst.psi(i, pick[i]);
        return s;
    };
    if (power_sum() > 1.0 - kBudgetEps) {
        // shift the heaviest consumers to their least power-hungry cell
        std::vector<std::size_t> order(K1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return inst.psi(a, pick[a]) > inst.psi(b, pick[b]);
        });
        for (std::size_t i : order) {
            if (power_sum() <= 1.0 - kBudgetEps) break;
            std::size_t best_k = pick[i];
            for (std::size_t k = 0; k < S; ++k) {
                if (y_req(i, k) > 1.0) continue;
                if (inst.psi(i, k) < inst.psi(i, best_k)) best_k = k;
            }
            pick[i] = best_k;
            need_y[i] = y_req(i, best_k);
        }
        if (power_sum() > 1.0 - kBudgetEps) {
            out.reason = "wireless backhaul power budget exceeded by the minimal allocation";
            return out;
        }
    }
    double band_dl = 0.0;
    for (std::size_t i = 0; i < K1; ++i) band_dl += need_y[i];
    if (band_dl > 1.0 - kBudgetEps) {
        out.reason = "downlink band budget exceeded by the minimal allocation";
        return out;
    }
    for (std::size_t i = 0; i < K1; ++i) {
        const std::size_t k = pick[i];
        out.vars.x1(i, k) = 1.0;
        out.vars.yt1(i, k) = need_y[i];
        out.vars.at(i, k) = std::min(1.0, inst.psi(i, k) * (1.0 + kPad));
    }

    // Service II: each user on one cell that alone meets both deadline floors,
    // best uplink rate first, spilling to other cells when compute fills up.
    std::vector<double> load_z(S, 0.0);
    double band_ul = 0.0;
    for (std::size_t j = 0; j < K2; ++j) {
        auto yu_req = [&](std::size_t k) {
            return inst.ul_floor_bps[j] / (inst.bu_hz * inst.r2(j, k)) * (1.0 + kPad);
        };
        auto z_req = [&](std::size_t k) {
            return inst.cpu_floor_cps[j] / inst.mec_speed_cps[k] * (1.0 + kPad);
        };
        std::size_t single = S;
        double best_r = -1.0;
        for (std::size_t k = 0; k < S; ++k) {
            if (yu_req(k) > 1.0 || z_req(k) + load_z[k] > 1.0 - kBudgetEps) continue;
            if (inst.r2(j, k) > best_r) {
                best_r = inst.r2(j, k);
                single = k;
            }
        }
        if (single == S) {
            out.reason = "service-II user " + std::to_string(j) +
                         " has no cell meeting both deadline floors";
            return out;
        }
        out.vars.x2(j, single) = 1.0;
        out.vars.yt2(j, single) = yu_req(single);
        out.vars.zt(j, single) = z_req(single);
        load_z[single] += z_req(single);
        band_ul += yu_req(single);
    }
    if (band_ul > 1.0 - kBudgetEps) {
        out.reason = "uplink band budget exceeded by the minimal allocation";
        return out;
    }
    out.ok = true;
    return out;
}

DecisionVars zero_vars(const ProblemInstance& inst) {
    DecisionVars v;
    v.x1 = Matrix<double>(inst.K1, inst.S);
    v.yt1 = Matrix<double>(inst.K1, inst.S);
    v.ct = Matrix<double>(inst.K1, inst.S);
    v.at = Matrix<double>(inst.K1, inst.S);
    v.x2 = Matrix<double>(inst.K2, inst.S);
    v.yt2 = Matrix<double>(inst.K2, inst.S);
    v.zt = Matrix<double>(inst.K2, inst.S);
    return v;
}

std::vector<double> flatten(const ProblemInstance& inst, const DecisionVars& vars) {
    std::vector<double> v(inst.n_total);
    auto put = [&](const Matrix<double>& m, std::size_t offset) {
        std::copy(m.storage().begin(), m.storage().end(), v.begin() + offset);
    };
    put(vars.x1, inst.ox1);
    put(vars.yt1, inst.oy1);
    put(vars.ct, inst.oc);
    put(vars.at, inst.oa);
    put(vars.x2, inst.ox2);
    put(vars.yt2, inst.oy2);
    put(vars.zt, inst.oz);
    return v;
}

DecisionVars unflatten(const ProblemInstance& inst, const std::vector<double>& v) {
    if (v.size() != inst.n_total)
        throw ValidationError("unflatten: flat vector length does not match the instance layout");
    DecisionVars vars = zero_vars(inst);
    auto take = [&](Matrix<double>& m, std::size_t offset) {
        std::copy(v.begin() + offset, v.begin() + offset + m.size(), m.storage().begin());
    };
    take(vars.x1, inst.ox1);
    take(vars.yt1, inst.oy1);
    take(vars.ct, inst.oc);
    take(vars.at, inst.oa);
    take(vars.x2, inst.ox2);
    take(vars.yt2, inst.oy2);
    take(vars.zt, inst.oz);
    return vars;
}

std::string vars_to_json(const DecisionVars& vars) {
    nlohmann::json j;
    to_json(j["x1"], vars.x1);
    to_json(j["yt1"], vars.yt1);
    to_json(j["ct"], vars.ct);
    to_json(j["at"], vars.at);
    to_json(j["x2"], vars.x2);
    to_json(j["yt2"], vars.yt2);
    to_json(j["zt"], vars.zt);
    return j.dump(2);
}

DecisionVars vars_from_json(const std::string& text) {
    DecisionVars vars;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        from_json(j.at("x1"), vars.x1);
        from_json(j.at("yt1"), vars.yt1);
        from_json(j.at("ct"), vars.ct);
        from_json(j.at("at"), vars.at);
        from_json(j.at("x2"), vars.x2);
        from_json(j.at("yt2"), vars.yt2);
        from_json(j.at("zt"), vars.zt);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("vars_from_json: ") + e.what());
    }
    return vars;
}

} // namespace fdmec
