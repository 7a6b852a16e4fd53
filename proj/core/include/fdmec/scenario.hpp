#pragma once

#include "fdmec/channel.hpp"
#include "fdmec/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdmec {

struct ContentCatalog {
    std::vector<double> popularity; // rank-ordered, sums to 1
    std::vector<double> sizes_bits; // one entry per content
    bool operator==(const ContentCatalog&) const = default;
};

// Prices attached to a download-service user's utility terms.
struct CoeffsServiceI {
    double alpha = 4e6;       // revenue per log unit of access rate
    double beta = 5e6;        // revenue per log unit of backhaul-free rate
    double gamma = 10.0;      // cost per Hz of downlink band
    double eta_per_bit = 2.0; // cost per bit of cache refreshment
    double epsilon = 1e7;     // cost per watt of wireless-backhaul power
    bool operator==(const CoeffsServiceI&) const = default;
};

struct CoeffsServiceII {
    double psi = 2e6;             // revenue per log unit of uplink rate
    double theta = 2e8;           // revenue per joule of saved handset energy
    double phi = 10.0;            // cost per Hz of uplink band
    double vartheta_per_cps = 2.7e-3; // cost per cycle/s of edge compute
    bool operator==(const CoeffsServiceII&) const = default;
};

struct UserServiceI {
    double x_m = 0.0, y_m = 0.0;
    std::size_t requested_content = 0; // catalog rank, 0-based
    double rate_requirement_bps = 2e6;
    CoeffsServiceI coeffs;
    bool operator==(const UserServiceI&) const = default;
};

struct UserServiceII {
    double x_m = 0.0, y_m = 0.0;
    TaskSpec task;
    CoeffsServiceII coeffs;
    bool operator==(const UserServiceII&) const = default;
};

struct SmallCell {
    double x_m = 0.0, y_m = 0.0;
    double cache_capacity_bits = 5e7;
    double mec_speed_cps = 1e10;
    bool operator==(const SmallCell&) const = default;
};

struct ScenarioConfig {
    std::size_t service1_users = 10;
    std::size_t service2_users = 10;
    std::size_t sbs_count = 4;
    double area_m = 1000.0;
    double hit_ratio = 0.3;
    bool ensure_feasible = true;
    std::size_t max_placement_attempts = 100;

    RadioParams radio;
    PathLossParams pathloss;

    std::size_t content_count = 100;
    double zipf_exponent = 1.2;
    double content_size_bits = 1e7;

    double cache_capacity_bits = 5e7;
    double mec_speed_cps = 1e10;

    double rate_requirement_bps = 2e6;
    CoeffsServiceI coeffs1;
    TaskSpec task;
    CoeffsServiceII coeffs2;

    bool operator==(const ScenarioConfig&) const = default;
};

struct Scenario {
    std::uint64_t seed = 0;
    double area_m = 1000.0;
    double mbs_x_m = 500.0, mbs_y_m = 500.0;
    RadioParams radio;
    ContentCatalog catalog;
    std::vector<SmallCell> cells;
    std::vector<UserServiceI> users1;
    std::vector<UserServiceII> users2;

    Matrix<double> gains1;   // cell -> service-I user, [i][k]
    Matrix<double> gains2;   // service-II user -> cell, [j][k]
    std::vector<double> mbs_gain; // macro cell -> small cell, [k]
    Matrix<std::uint8_t> hit;     // 1 when user i's content already sits in cell k's cache

    // Scheme switches; the plain scenario has everything enabled.
    bool fd_enabled = true;
    bool caching_enabled = true;
    double hd_rate_factor = 0.5; // access-rate multiplier for uncached pairs when fd is off

    bool operator==(const Scenario&) const = default;
};

// p_f proportional to 1/f^exponent over ranks f = 1..content_count.
std::vector<double> zipf_popularity(std::size_t content_count, double exponent);

// Bernoulli cache-hit matrix; per-user success probability is proportional to the
// popularity of the user's requested content, scaled so the mean over users equals
// target_hit_ratio (clamped to [0, 1]).
Matrix<std::uint8_t> sample_hit_matrix(const ContentCatalog& catalog,
                                       const std::vector<std::size_t>& requests,
                                       std::size_t cell_count, double target_hit_ratio,
                                       std::uint64_t seed);

// Deterministic scenario from (config, seed). Placement is uniform over the square;
// when ensure_feasible is set, draws that admit no constructive allocation are
// redrawn deterministically up to max_placement_attempts.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

} // namespace fdmec
