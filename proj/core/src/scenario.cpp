#include "fdmec/scenario.hpp"

#include "fdmec/errors.hpp"
#include "fdmec/problem.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fdmec {

namespace {

// substream ids; ranges keep entity classes disjoint
constexpr std::uint64_t kStreamAttempt = 0xA77E3F00ULL;
constexpr std::uint64_t kStreamCell = 0x100000ULL;
constexpr std::uint64_t kStreamUser1 = 0x200000ULL;
constexpr std::uint64_t kStreamUser2 = 0x300000ULL;
constexpr std::uint64_t kStreamFade1 = 0x40000000ULL;
constexpr std::uint64_t kStreamFade2 = 0x50000000ULL;
constexpr std::uint64_t kStreamFadeMbs = 0x600000ULL;
constexpr std::uint64_t kStreamHit = 0x700000ULL;

double distance(double x0, double y0, double x1, double y1) {
    return std::hypot(x1 - x0, y1 - y0);
}

double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void check(std::vector<std::string>& errs, bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
}

void validate_config(const ScenarioConfig& c) {
    std::vector<std::string> errs;
    check(errs, c.sbs_count >= 1, "sbs_count must be at least 1");
    check(errs, c.service1_users + c.service2_users >= 1, "at least one user is required");
    check(errs, c.area_m > 0.0, "area_m must be positive");
    check(errs, c.hit_ratio >= 0.0 && c.hit_ratio <= 1.0, "hit_ratio must lie in [0, 1]");
    check(errs, c.max_placement_attempts >= 1, "max_placement_attempts must be at least 1");
    check(errs, c.content_count >= 1, "content_count must be at least 1");
    check(errs, c.zipf_exponent > 0.0, "zipf_exponent must be positive");
    check(errs, c.content_size_bits > 0.0, "content_size_bits must be positive");
    check(errs, c.cache_capacity_bits >= 0.0, "cache_capacity_bits must be non-negative");
    check(errs, c.mec_speed_cps > 0.0, "mec_speed_cps must be positive");
    check(errs, c.rate_requirement_bps > 0.0, "rate_requirement_bps must be positive");

    check(errs, c.radio.sbs_tx_power_w > 0.0, "radio.sbs_tx_power_w must be positive");
    check(errs, c.radio.mbs_total_power_w > 0.0, "radio.mbs_total_power_w must be positive");
    check(errs, c.radio.ue_tx_power_w > 0.0, "radio.ue_tx_power_w must be positive");
    check(errs, c.radio.noise_power_w > 0.0, "radio.noise_power_w must be positive");
    check(errs, c.radio.residual_si_gain > 0.0 && c.radio.residual_si_gain < 1.0,
          "radio.residual_si_gain must lie in (0, 1)");
    check(errs, c.radio.dl_bandwidth_hz > 0.0, "radio.dl_bandwidth_hz must be positive");
    check(errs, c.radio.ul_bandwidth_hz > 0.0, "radio.ul_bandwidth_hz must be positive");

    check(errs, c.pathloss.min_distance_m > 0.0, "pathloss.min_distance_m must be positive");

    check(errs, c.task.input_bits > 0.0, "task.input_bits must be positive");
    check(errs, c.task.cpu_cycles > 0.0, "task.cpu_cycles must be positive");
    check(errs, c.task.local_speed_cps > 0.0, "task.local_speed_cps must be positive");
    check(errs, c.task.local_power_w >= 0.0, "task.local_power_w must be non-negative");
    check(errs, c.task.uplink_deadline_s > 0.0, "task.uplink_deadline_s must be positive");
    check(errs, c.task.deadline_s > c.task.uplink_deadline_s,
          "task.deadline_s must exceed task.uplink_deadline_s");
    if (c.task.cpu_cycles > 0.0 && c.task.local_speed_cps > 0.0) {
        check(errs, c.task.deadline_s <= local_exec_time(c.task),
              "task.deadline_s must not exceed the local execution time "
              "(offloading must be able to pay off)");
    }

    check(errs, c.coeffs1.alpha >= 0.0, "coeffs1.alpha must be non-negative");
    check(errs, c.coeffs1.beta >= 0.0, "coeffs1.beta must be non-negative");
    check(errs, c.coeffs1.gamma >= 0.0, "coeffs1.gamma must be non-negative");
    check(errs, c.coeffs1.eta_per_bit >= 0.0, "coeffs1.eta_per_bit must be non-negative");
    check(errs, c.coeffs1.epsilon >= 0.0, "coeffs1.epsilon must be non-negative");
    check(errs, c.coeffs2.psi >= 0.0, "coeffs2.psi must be non-negative");
    check(errs, c.coeffs2.theta >= 0.0, "coeffs2.theta must be non-negative");
    check(errs, c.coeffs2.phi >= 0.0, "coeffs2.phi must be non-negative");
    check(errs, c.coeffs2.vartheta_per_cps >= 0.0, "coeffs2.vartheta_per_cps must be non-negative");

    if (!errs.empty()) {
        std::string all = "invalid scenario config: " + errs[0];
        for (std::size_t i = 1; i < errs.size(); ++i) all += "; " + errs[i];
        throw ValidationError(all);
    }
}

Scenario draw_scenario(const ScenarioConfig& cfg, std::uint64_t master_seed,
                       std::uint64_t attempt_base) {
    Scenario sc;
    sc.seed = master_seed;
    sc.area_m = cfg.area_m;
    sc.mbs_x_m = cfg.area_m / 2.0;
    sc.mbs_y_m = cfg.area_m / 2.0;
    sc.radio = cfg.radio;

    sc.catalog.popularity = zipf_popularity(cfg.content_count, cfg.zipf_exponent);
    sc.catalog.sizes_bits.assign(cfg.content_count, cfg.content_size_bits);

    for (std::size_t k = 0; k < cfg.sbs_count; ++k) {
        Rng rng(split_seed(attempt_base, kStreamCell + k));
        SmallCell cell;
        cell.x_m = rng.uniform(0.0, cfg.area_m);
        cell.y_m = rng.uniform(0.0, cfg.area_m);
        cell.cache_capacity_bits = cfg.cache_capacity_bits;
        cell.mec_speed_cps = cfg.mec_speed_cps;
        sc.cells.push_back(cell);
    }

    std::vector<std::size_t> requests;
    for (std::size_t i = 0; i < cfg.service1_users; ++i) {
        Rng rng(split_seed(attempt_base, kStreamUser1 + i));
        UserServiceI u;
        u.x_m = rng.uniform(0.0, cfg.area_m);
        u.y_m = rng.uniform(0.0, cfg.area_m);
        u.requested_content = rng.weighted_index(sc.catalog.popularity.data(),
                                                 sc.catalog.popularity.size(), 1.0);
        u.rate_requirement_bps = cfg.rate_requirement_bps;
        u.coeffs = cfg.coeffs1;
        requests.push_back(u.requested_content);
        sc.users1.push_back(u);
    }
    for (std::size_t j = 0; j < cfg.service2_users; ++j) {
        Rng rng(split_seed(attempt_base, kStreamUser2 + j));
        UserServiceII u;
        u.x_m = rng.uniform(0.0, cfg.area_m);
        u.y_m = rng.uniform(0.0, cfg.area_m);
        u.task = cfg.task;
        u.coeffs = cfg.coeffs2;
        sc.users2.push_back(u);
    }

    auto link_gain = [&](double x0, double y0, double x1, double y1, std::uint64_t fade_stream) {
        double g = path_loss_gain(distance(x0, y0, x1, y1), cfg.pathloss);
        if (cfg.pathloss.rayleigh_fading) {
            Rng rng(split_seed(attempt_base, fade_stream));
            g *= rayleigh_fading_gain(rng);
        }
        return g;
    };

    sc.gains1 = Matrix<double>(cfg.service1_users, cfg.sbs_count);
    sc.gains2 = Matrix<double>(cfg.service2_users, cfg.sbs_count);
    for (std::size_t i = 0; i < cfg.service1_users; ++i)
        for (std::size_t k = 0; k < cfg.sbs_count; ++k)
            sc.gains1(i, k) = link_gain(sc.users1[i].x_m, sc.users1[i].y_m, sc.cells[k].x_m,
                                        sc.cells[k].y_m, kStreamFade1 + (i << 16) + k);
    for (std::size_t j = 0; j < cfg.service2_users; ++j)
        for (std::size_t k = 0; k < cfg.sbs_count; ++k)
            sc.gains2(j, k) = link_gain(sc.users2[j].x_m, sc.users2[j].y_m, sc.cells[k].x_m,
                                        sc.cells[k].y_m, kStreamFade2 + (j << 16) + k);
    for (std::size_t k = 0; k < cfg.sbs_count; ++k)
        sc.mbs_gain.push_back(link_gain(sc.mbs_x_m, sc.mbs_y_m, sc.cells[k].x_m, sc.cells[k].y_m,
                                        kStreamFadeMbs + k));

    sc.hit = sample_hit_matrix(sc.catalog, requests, cfg.sbs_count, cfg.hit_ratio,
                               split_seed(attempt_base, kStreamHit));
    return sc;
}

} // namespace

std::vector<double> zipf_popularity(std::size_t content_count, double exponent) {
    if (content_count == 0) throw ValidationError("zipf_popularity: content_count must be positive");
    if (exponent <= 0.0) throw ValidationError("zipf_popularity: exponent must be positive");
    std::vector<double> p(content_count);
    for (std::size_t f = 0; f < content_count; ++f)
        p[f] = std::pow(static_cast<double>(f + 1), -exponent);
    const double total = kahan_sum(p);
    for (double& v : p) v /= total;
    return p;
}

Matrix<std::uint8_t> sample_hit_matrix(const ContentCatalog& catalog,
                                       const std::vector<std::size_t>& requests,
                                       std::size_t cell_count, double target_hit_ratio,
                                       std::uint64_t seed) {
    if (target_hit_ratio < 0.0 || target_hit_ratio > 1.0)
        throw ValidationError("sample_hit_matrix: target_hit_ratio must lie in [0, 1]");
    const std::size_t n = requests.size();
    Matrix<std::uint8_t> hit(n, cell_count);
    if (n == 0 || cell_count == 0 || target_hit_ratio == 0.0) return hit;

    std::vector<double> q(n);
    double q_min = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (requests[i] >= catalog.popularity.size())
            throw ValidationError("sample_hit_matrix: request rank outside catalog");
        q[i] = catalog.popularity[requests[i]];
        if (q[i] <= 0.0) throw ValidationError("sample_hit_matrix: popularity must be positive");
        q_min = std::min(q_min, q[i]);
    }

    // per-user probability min(1, c*q_i), with c chosen so the mean hits the target
    auto mean_at = [&](double c) {
        double s = 0.0;
        for (double qi : q) s += std::min(1.0, c * qi);
        return s / static_cast<double>(n);
    };
    double lo = 0.0, hi = 1.0 / q_min;
    double c = hi;
    if (mean_at(hi) > target_hit_ratio) {
        for (int it = 0; it < 200; ++it) {
            c = 0.5 * (lo + hi);
            if (mean_at(c) < target_hit_ratio)
                lo = c;
            else
                hi = c;
        }
        c = hi;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::min(1.0, c * q[i]);
        for (std::size_t k = 0; k < cell_count; ++k) {
            Rng rng(split_seed(seed, (static_cast<std::uint64_t>(i) << 16) + k));
            hit(i, k) = rng.bernoulli(p) ? 1 : 0;
        }
    }
    return hit;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    validate_config(config);
    std::string last_reason;
    const std::size_t attempts = config.ensure_feasible ? config.max_placement_attempts : 1;
    for (std::size_t a = 0; a < attempts; ++a) {
        Scenario sc = draw_scenario(config, seed, split_seed(seed, kStreamAttempt + a));
        if (!config.ensure_feasible) return sc;
        const ProblemInstance inst = build_instance(sc);
        const ConstructiveResult res = constructive_point(inst);
        if (res.ok) return sc;
        last_reason = res.reason;
    }
    throw InfeasibleError("generate_scenario: no feasible placement after " +
                          std::to_string(attempts) + " attempts (last: " + last_reason + ")");
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ContentCatalog, popularity, sizes_bits)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoeffsServiceI, alpha, beta, gamma, eta_per_bit, epsilon)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoeffsServiceII, psi, theta, phi, vartheta_per_cps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TaskSpec, input_bits, cpu_cycles, local_speed_cps,
                                   local_power_w, deadline_s, uplink_deadline_s)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RadioParams, sbs_tx_power_w, mbs_total_power_w, ue_tx_power_w,
                                   noise_power_w, residual_si_gain, dl_bandwidth_hz,
                                   ul_bandwidth_hz)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(UserServiceI, x_m, y_m, requested_content,
                                   rate_requirement_bps, coeffs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(UserServiceII, x_m, y_m, task, coeffs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SmallCell, x_m, y_m, cache_capacity_bits, mec_speed_cps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Scenario, seed, area_m, mbs_x_m, mbs_y_m, radio, catalog,
                                   cells, users1, users2, gains1, gains2, mbs_gain, hit,
                                   fd_enabled, caching_enabled, hd_rate_factor)

std::string scenario_to_json(const Scenario& s) {
    nlohmann::json j = s;
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<Scenario>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("scenario_from_json: ") + e.what());
    }
}

} // namespace fdmec
