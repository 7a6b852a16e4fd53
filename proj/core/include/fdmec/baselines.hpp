#pragma once

#include "fdmec/admm.hpp"
#include "fdmec/problem.hpp"
#include "fdmec/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdmec {

// Comparison schemes: the full system, backhaul-only delivery (no caching), and
// caching-only delivery (no wireless self-backhaul).
enum class SchemeId { Proposed, Scheme1FdOnly, Scheme2CacheOnly };

const char* to_string(SchemeId s);                 // "proposed" | "fd_only" | "cache_only"
SchemeId scheme_from_string(const std::string& s); // accepts the strings above

enum class SweepParam { UserPairs, SbsCount, HitRatio };

const char* to_string(SweepParam p); // "user_pairs" | "sbs_count" | "hit_ratio"
SweepParam sweep_param_from_string(const std::string& s);

// Scheme transform on a drawn deployment. Proposed is the identity;
// Scheme1FdOnly clears every cache hit and disables refreshment, so all
// service-I traffic rides the full-duplex backhaul; Scheme2CacheOnly disables
// the full-duplex backhaul, so uncached traffic falls back to the half-duplex
// access rate.
Scenario apply_scheme(const Scenario& scenario, SchemeId scheme);

// The priced terms of the utility, raw units, evaluated at `vars`.
struct CostBreakdown {
    double band = 0.0;    // downlink + uplink bandwidth prices
    double cache = 0.0;   // refreshment prices
    double power = 0.0;   // wireless-backhaul power prices
    double compute = 0.0; // edge compute prices
};

CostBreakdown cost_breakdown(const ProblemInstance& inst, const DecisionVars& vars);

struct SweepSpec {
    SweepParam param = SweepParam::UserPairs;
    std::vector<double> grid;       // swept values, in run order
    std::size_t seeds_per_point = 1;
    std::uint64_t base_seed = 1;
    std::vector<SchemeId> schemes = {SchemeId::Proposed, SchemeId::Scheme1FdOnly,
                                     SchemeId::Scheme2CacheOnly};
    ScenarioConfig base;
    AdmmConfig admm;
    std::size_t threads = 1; // worker threads over (scheme, point, seed) runs
};

struct SweepRecord {
    SchemeId scheme = SchemeId::Proposed;
    std::string param;
    double value = 0.0;
    std::uint64_t seed = 0; // derived per-run seed, replayable via the CLI
    double utility_relaxed = 0.0;
    double utility_int = 0.0;
    double saved_backhaul_bps = 0.0;
    double cost_band = 0.0;
    double cost_cache = 0.0;
    double cost_power = 0.0;
    double cost_compute = 0.0;
    std::size_t iters = 0;
    std::string error; // empty on success; metrics are zero when set

    bool operator==(const SweepRecord&) const = default;
};

struct SweepResult {
    std::vector<SweepRecord> records; // ordered by (scheme, point, seed)

    bool operator==(const SweepResult&) const = default;
};

// Per-run seed shared by every scheme at the same (point, seed) slot, so the
// schemes are compared on identical deployments.
std::uint64_t sweep_seed(std::uint64_t base, std::size_t point_index, std::size_t seed_index);

// Runs every (scheme, grid point, seed) combination: generate the deployment,
// apply the scheme, solve the relaxation by consensus, recover integers, and
// record utilities, saved backhaul, costs, and iteration counts. Per-run
// failures land in the record's `error` field instead of aborting the sweep.
SweepResult run_sweep(const SweepSpec& spec);

// Fraction of records with an empty error field.
double success_fraction(const SweepResult& result);

extern const char* const kSweepCsvHeader;

// Lossless, deterministic CSV (shortest round-trip float formatting). Error
// text is sanitized so fields never contain commas or newlines.
std::string to_csv(const SweepResult& result);
SweepResult sweep_from_csv(const std::string& text);

} // namespace fdmec
