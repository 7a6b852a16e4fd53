#pragma once

#include "fdmec/matrix.hpp"
#include "fdmec/scenario.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fdmec {

// Decision variables of the relaxed allocation program, all elementwise in [0, 1].
// The tilde blocks are the products of association x with the underlying share
// (bandwidth y, cache refreshment c, backhaul power a, compute z), which is what
// makes the program jointly concave.
struct DecisionVars {
    Matrix<double> x1;  // service-I association, [i][k]
    Matrix<double> yt1; // x1 * downlink bandwidth share
    Matrix<double> ct;  // x1 * cache refreshment decision
    Matrix<double> at;  // x1 * backhaul power fraction
    Matrix<double> x2;  // service-II association, [j][k]
    Matrix<double> yt2; // x2 * uplink bandwidth share
    Matrix<double> zt;  // x2 * edge compute share

    bool operator==(const DecisionVars&) const = default;
};

// Shares recovered from the tilde products (y = yt / x when x is meaningfully
// positive, else 0).
struct OriginalVars {
    Matrix<double> y1, c, a; // service I
    Matrix<double> y2, z;    // service II
};

// One constraint family's worst residual in <= 0 form: LHS - RHS. `raw` keeps the
// natural units of the row (bps for rate floors, bits for cache capacity);
// `normalized` divides by the row's right-hand scale so families are comparable
// and tolerances are dimensionless.
struct FamilyResidual {
    double raw = -std::numeric_limits<double>::infinity();
    double normalized = -std::numeric_limits<double>::infinity();
};

struct ConstraintResiduals {
    FamilyResidual c1;       // per service-I user: association row sum <= 1
    FamilyResidual c2;       // per service-II user: association row sum <= 1
    FamilyResidual c3;       // total downlink bandwidth shares <= 1
    FamilyResidual c4;       // total uplink bandwidth shares <= 1
    FamilyResidual c5;       // per service-I user: delivered rate >= requirement
    FamilyResidual c6;       // per pair: backhaul power covers the access rate
    FamilyResidual c7;       // total backhaul power fractions <= 1
    FamilyResidual c8;       // per service-II user: upload rate >= deadline floor
    FamilyResidual c9;       // per service-II user: compute rate >= deadline floor
    FamilyResidual c10;      // per cell: refreshed bits <= cache capacity
    FamilyResidual c11;      // per cell: compute shares <= 1
    FamilyResidual coupling; // tilde blocks <= their association entry
    FamilyResidual bounds;   // box [0, 1]

    double max_normalized() const;
    double max_raw() const;
};

// Everything the solvers need, precomputed from a Scenario. Utility coefficients
// are also kept pre-divided by `scale` so solver-side objectives stay O(1e3).
struct ProblemInstance {
    std::size_t K1 = 0, K2 = 0, S = 0;
    double scale = 1e6;

    double bd_hz = 20e6, bu_hz = 20e6;
    double mbs_power_w = 0.0;
    double noise_w = 0.0;

    bool fd_enabled = true;
    bool caching_enabled = true;

    Matrix<double> r1;  // access spectral efficiency, service I (scheme-adjusted)
    Matrix<double> r2;  // uplink spectral efficiency, service II
    Matrix<double> psi; // C6 coefficient; 0 where hit = 1 or fd disabled
    Matrix<std::uint8_t> hit;
    Matrix<double> vprime; // (1-hit) * content value / (bd * r1), the beta-log credit per unit ct
    Matrix<double> L1;     // ln(bd * r1)
    Matrix<double> L2;     // ln(bu * r2)

    std::vector<double> rate_req_bps; // per service-I user
    std::vector<double> size_bits;    // requested content size, per service-I user
    std::vector<double> value_bits;   // popularity-weighted content value, per service-I user
    std::vector<CoeffsServiceI> coeffs1;
    std::vector<CoeffsServiceII> coeffs2;
    std::vector<TaskSpec> tasks;

    std::vector<double> ul_floor_bps;  // input_bits / uplink_deadline
    std::vector<double> cpu_floor_cps; // cpu_cycles / (deadline - uplink_deadline)
    std::vector<double> mec_speed_cps; // per cell
    std::vector<double> cache_capacity_bits;

    // scaled per-user coefficients
    std::vector<double> cA, cB, cG, cHs, cE;  // service I
    std::vector<double> cP, cT, cF, cVth;     // service II

    // flat layout: [x1 | yt1 | ct | at | x2 | yt2 | zt], row-major per block
    std::size_t n_total = 0;
    std::size_t ox1 = 0, oy1 = 0, oc = 0, oa = 0, ox2 = 0, oy2 = 0, oz = 0;
    std::size_t ix1(std::size_t i, std::size_t k) const { return ox1 + i * S + k; }
    std::size_t iy1(std::size_t i, std::size_t k) const { return oy1 + i * S + k; }
    std::size_t ic(std::size_t i, std::size_t k) const { return oc + i * S + k; }
    std::size_t ia(std::size_t i, std::size_t k) const { return oa + i * S + k; }
    std::size_t ix2(std::size_t j, std::size_t k) const { return ox2 + j * S + k; }
    std::size_t iy2(std::size_t j, std::size_t k) const { return oy2 + j * S + k; }
    std::size_t iz(std::size_t j, std::size_t k) const { return oz + j * S + k; }

    std::vector<double> lb, ub; // box, with forced zeros where a block is disabled
};

struct ConstructiveResult {
    bool ok = false;
    std::string reason;
    DecisionVars vars;
};

ProblemInstance build_instance(const Scenario& scenario);

// Single-pair utilities in raw (unscaled) units; arguments are the substituted variables.
double utility_service1(const ProblemInstance& inst, std::size_t i, std::size_t k,
                        double x, double yt, double ct, double at);
double utility_service2(const ProblemInstance& inst, std::size_t j, std::size_t k,
                        double x, double yt, double zt);

// System utility in raw units.
double objective(const ProblemInstance& inst, const DecisionVars& vars);

// Scaled system utility (maximization sense) with gradient; `v` and `grad` have
// length inst.n_total. This is the evaluator the solvers run on.
double scaled_utility_and_gradient(const ProblemInstance& inst, const double* v, double* grad);
double scaled_utility(const ProblemInstance& inst, const double* v);

// Scaled utility of the pairs hosted by one cell, with gradient over the full
// layout (entries outside that cell's pairs are zeroed).
double scaled_cell_utility_and_gradient(const ProblemInstance& inst, std::size_t k,
                                        const double* v, double* grad);

ConstraintResiduals constraint_residuals(const ProblemInstance& inst, const DecisionVars& vars);

OriginalVars recover_original(const ProblemInstance& inst, const DecisionVars& vars,
                              double x_threshold = 1e-9);

// Traffic served without touching the backhaul band: full-duplex (or cached) access
// rate plus the refreshment credit, in bps.
double saved_backhaul(const ProblemInstance& inst, const DecisionVars& vars);

// Documented feasible point: each user rides its best serviceable cell with the
// minimum shares that satisfy the rate and deadline floors. Fails (with a reason)
// when even that allocation exceeds a shared budget.
ConstructiveResult constructive_point(const ProblemInstance& inst);

DecisionVars zero_vars(const ProblemInstance& inst);
std::vector<double> flatten(const ProblemInstance& inst, const DecisionVars& vars);
DecisionVars unflatten(const ProblemInstance& inst, const std::vector<double>& v);

std::string vars_to_json(const DecisionVars& vars);
DecisionVars vars_from_json(const std::string& text);

} // namespace fdmec
