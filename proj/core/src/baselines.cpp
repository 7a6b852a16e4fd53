#include "fdmec/baselines.hpp"

#include "fdmec/errors.hpp"
#include "fdmec/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>

namespace fdmec {

namespace {

std::string sanitize_field(std::string text) {
    for (char& ch : text) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return text;
}

std::string fmt_double(double v) {
    char buf[48];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void validate_spec(const SweepSpec& spec) {
    std::vector<std::string> errs;
    if (spec.grid.empty()) errs.push_back("sweep grid must be non-empty");
    if (spec.seeds_per_point == 0) errs.push_back("seeds_per_point must be at least 1");
    if (spec.schemes.empty()) errs.push_back("scheme list must be non-empty");
    for (double v : spec.grid) {
        switch (spec.param) {
        case SweepParam::UserPairs:
        case SweepParam::SbsCount:
            if (!(v >= 1.0) || std::floor(v) != v) {
                errs.push_back("grid value " + fmt_double(v) + " must be a positive integer");
            }
            break;
        case SweepParam::HitRatio:
            if (!(v >= 0.0 && v <= 1.0)) {
                errs.push_back("grid value " + fmt_double(v) + " must lie in [0, 1]");
            }
            break;
        }
    }
    if (!errs.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < errs.size(); ++i) {
            if (i) joined += "; ";
            joined += errs[i];
        }
        throw ValidationError("invalid sweep spec: " + joined);
    }
}

ScenarioConfig config_at(const SweepSpec& spec, double value) {
    ScenarioConfig cfg = spec.base;
    switch (spec.param) {
    case SweepParam::UserPairs:
        cfg.service1_users = static_cast<std::size_t>(value);
        cfg.service2_users = static_cast<std::size_t>(value);
        break;
    case SweepParam::SbsCount:
        cfg.sbs_count = static_cast<std::size_t>(value);
        break;
    case SweepParam::HitRatio:
        cfg.hit_ratio = value;
        break;
    }
    return cfg;
}

} // namespace

const char* to_string(SchemeId s) {
    switch (s) {
    case SchemeId::Proposed: return "proposed";
    case SchemeId::Scheme1FdOnly: return "fd_only";
    case SchemeId::Scheme2CacheOnly: return "cache_only";
    }
    return "proposed";
}

SchemeId scheme_from_string(const std::string& s) {
    if (s == "proposed") return SchemeId::Proposed;
    if (s == "fd_only") return SchemeId::Scheme1FdOnly;
    if (s == "cache_only") return SchemeId::Scheme2CacheOnly;
    throw ValidationError("unknown scheme '" + s +
                          "' (expected proposed, fd_only, or cache_only)");
}

const char* to_string(SweepParam p) {
    switch (p) {
    case SweepParam::UserPairs: return "user_pairs";
    case SweepParam::SbsCount: return "sbs_count";
    case SweepParam::HitRatio: return "hit_ratio";
    }
    return "user_pairs";
}

SweepParam sweep_param_from_string(const std::string& s) {
    if (s == "user_pairs") return SweepParam::UserPairs;
    if (s == "sbs_count") return SweepParam::SbsCount;
    if (s == "hit_ratio") return SweepParam::HitRatio;
    throw ValidationError("unknown sweep parameter '" + s +
                          "' (expected user_pairs, sbs_count, or hit_ratio)");
}

Scenario apply_scheme(const Scenario& scenario, SchemeId scheme) {
    Scenario out = scenario;
    switch (scheme) {
    case SchemeId::Proposed:
        break;
    case SchemeId::Scheme1FdOnly:
        for (std::uint8_t& h : out.hit.storage()) h = 0;
        out.caching_enabled = false;
        break;
    case SchemeId::Scheme2CacheOnly:
        out.fd_enabled = false;
        break;
    }
    return out;
}

CostBreakdown cost_breakdown(const ProblemInstance& inst, const DecisionVars& vars) {
    CostBreakdown out;
    for (std::size_t i = 0; i < inst.K1; ++i) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            out.band += inst.cG[i] * vars.yt1(i, k);
            if (!inst.hit(i, k)) {
                if (inst.caching_enabled) out.cache += inst.cHs[i] * vars.ct(i, k);
                if (inst.fd_enabled) out.power += inst.cE[i] * vars.at(i, k);
            }
        }
    }
    for (std::size_t j = 0; j < inst.K2; ++j) {
        for (std::size_t k = 0; k < inst.S; ++k) {
            out.band += inst.cF[j] * vars.yt2(j, k);
            out.compute += inst.cVth[j] * inst.mec_speed_cps[k] * vars.zt(j, k);
        }
    }
    out.band *= inst.scale;
    out.cache *= inst.scale;
    out.power *= inst.scale;
    out.compute *= inst.scale;
    return out;
}

std::uint64_t sweep_seed(std::uint64_t base, std::size_t point_index, std::size_t seed_index) {
    return base + static_cast<std::uint64_t>(point_index) * 10007ULL +
           static_cast<std::uint64_t>(seed_index);
}

namespace {

SweepRecord run_point(const SweepSpec& spec, SchemeId scheme, std::size_t point_index,
                      std::size_t seed_index) {
    SweepRecord rec;
    rec.scheme = scheme;
    rec.param = to_string(spec.param);
    rec.value = spec.grid[point_index];
    rec.seed = sweep_seed(spec.base_seed, point_index, seed_index);
    try {
        const ScenarioConfig cfg = config_at(spec, spec.grid[point_index]);
        const Scenario scen = apply_scheme(generate_scenario(cfg, rec.seed), scheme);
        const ProblemInstance inst = build_instance(scen);
        const SolveReport rep = admm_solve(inst, spec.admm);
        const RecoveryResult rcv = recover_solution(inst, rep.vars);
        const ConstraintResiduals res = assigned_residuals(inst, rcv.vars, rcv.assignment);
        if (res.max_normalized() > 1e-6) {
            throw SolverError("recovered solution violates constraints (residual " +
                              fmt_double(res.max_normalized()) + ")");
        }
        rec.utility_relaxed = rcv.relaxed_objective;
        rec.utility_int = rcv.objective;
        rec.saved_backhaul_bps = saved_backhaul(inst, rcv.vars);
        const CostBreakdown cost = cost_breakdown(inst, rcv.vars);
        rec.cost_band = cost.band;
        rec.cost_cache = cost.cache;
        rec.cost_power = cost.power;
        rec.cost_compute = cost.compute;
        rec.iters = rep.iterations;
    } catch (const std::exception& ex) {
        rec = SweepRecord{};
        rec.scheme = scheme;
        rec.param = to_string(spec.param);
        rec.value = spec.grid[point_index];
        rec.seed = sweep_seed(spec.base_seed, point_index, seed_index);
        rec.error = sanitize_field(ex.what());
    }
    return rec;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    validate_spec(spec);
    struct Slot {
        SchemeId scheme;
        std::size_t point, seed;
    };
    std::vector<Slot> slots;
    slots.reserve(spec.schemes.size() * spec.grid.size() * spec.seeds_per_point);
    for (SchemeId scheme : spec.schemes) {
        for (std::size_t p = 0; p < spec.grid.size(); ++p) {
            for (std::size_t s = 0; s < spec.seeds_per_point; ++s) {
                slots.push_back({scheme, p, s});
            }
        }
    }
    SweepResult out;
    out.records.resize(slots.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(spec.threads, slots.size()));
    if (workers == 1) {
        for (std::size_t n = 0; n < slots.size(); ++n) {
            out.records[n] = run_point(spec, slots[n].scheme, slots[n].point, slots[n].seed);
        }
        return out;
    }
    // Runs are independent and land in their own slot, so the record order (and
    // therefore the CSV bytes) does not depend on the thread count.
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t n = next.fetch_add(1); n < slots.size(); n = next.fetch_add(1)) {
            out.records[n] = run_point(spec, slots[n].scheme, slots[n].point, slots[n].seed);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    return out;
}

double success_fraction(const SweepResult& result) {
    if (result.records.empty()) return 1.0;
    std::size_t ok = 0;
    for (const SweepRecord& r : result.records) {
        if (r.error.empty()) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(result.records.size());
}

const char* const kSweepCsvHeader =
    "scheme,param,value,seed,utility_relaxed,utility_int,saved_backhaul_bps,"
    "cost_band,cost_cache,cost_power,cost_compute,iters,error";

std::string to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << kSweepCsvHeader << '\n';
    for (const SweepRecord& r : result.records) {
        os << to_string(r.scheme) << ',' << sanitize_field(r.param) << ','
           << fmt_double(r.value) << ',' << r.seed << ',' << fmt_double(r.utility_relaxed)
           << ',' << fmt_double(r.utility_int) << ',' << fmt_double(r.saved_backhaul_bps)
           << ',' << fmt_double(r.cost_band) << ',' << fmt_double(r.cost_cache) << ','
           << fmt_double(r.cost_power) << ',' << fmt_double(r.cost_compute) << ',' << r.iters
           << ',' << sanitize_field(r.error) << '\n';
    }
    return os.str();
}

SweepResult sweep_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kSweepCsvHeader) {
        throw ValidationError("sweep CSV: missing or unexpected header line");
    }
    SweepResult out;
    std::size_t lineno = 1;
    auto parse_double = [&lineno](const std::string& field, const char* name) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(field, &pos);
            if (pos != field.size()) throw std::invalid_argument(field);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("sweep CSV line " + std::to_string(lineno) + ": bad " +
                                  std::string(name) + " value '" + field + "'");
        }
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t pos = 0; pos <= line.size(); ++pos) {
            if (pos == line.size() || line[pos] == ',') {
                fields.push_back(line.substr(start, pos - start));
                start = pos + 1;
            }
        }
        if (fields.size() != 13) {
            throw ValidationError("sweep CSV line " + std::to_string(lineno) + ": expected 13 " +
                                  "fields, got " + std::to_string(fields.size()));
        }
        SweepRecord rec;
        rec.scheme = scheme_from_string(fields[0]);
        rec.param = fields[1];
        rec.value = parse_double(fields[2], "value");
        try {
            rec.seed = std::stoull(fields[3]);
            rec.iters = std::stoul(fields[11]);
        } catch (const std::exception&) {
            throw ValidationError("sweep CSV line " + std::to_string(lineno) +
                                  ": bad integer field");
        }
        rec.utility_relaxed = parse_double(fields[4], "utility_relaxed");
        rec.utility_int = parse_double(fields[5], "utility_int");
        rec.saved_backhaul_bps = parse_double(fields[6], "saved_backhaul_bps");
        rec.cost_band = parse_double(fields[7], "cost_band");
        rec.cost_cache = parse_double(fields[8], "cost_cache");
        rec.cost_power = parse_double(fields[9], "cost_power");
        rec.cost_compute = parse_double(fields[10], "cost_compute");
        rec.error = fields[12];
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace fdmec
