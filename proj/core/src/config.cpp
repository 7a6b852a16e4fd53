#include "fdmec/config.hpp"

#include "fdmec/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace fdmec {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string fmt_double(double v) {
    char buf[48];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

using Fail = std::function<void(const std::string&)>;

double parse_number(const std::string& raw, const Fail& fail) {
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size() || raw.empty()) {
        fail("expected a number, got '" + raw + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& raw, const Fail& fail) {
    const double v = parse_number(raw, fail);
    if (v < 0.0 || std::floor(v) != v || v > 1.8e19) {
        fail("expected a non-negative integer, got '" + raw + "'");
    }
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& raw, const Fail& fail) {
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail("expected true or false, got '" + raw + "'");
    return false;
}

std::string parse_string(const std::string& raw, const Fail& fail) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        return raw.substr(1, raw.size() - 2);
    }
    if (!raw.empty() && raw.find_first_of("\"[],") == std::string::npos) return raw;
    fail("expected a string, got '" + raw + "'");
    return {};
}

std::vector<std::string> parse_array(const std::string& raw, const Fail& fail) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
        fail("expected an array like [a, b, c], got '" + raw + "'");
    }
    std::vector<std::string> out;
    const std::string body = raw.substr(1, raw.size() - 2);
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= body.size(); ++pos) {
        if (pos == body.size() || body[pos] == ',') {
            const std::string item = trim(std::string_view(body).substr(start, pos - start));
            if (!item.empty()) out.push_back(item);
            start = pos + 1;
        }
    }
    if (out.empty()) fail("array must not be empty");
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
    RunConfig cfg;
    std::size_t lineno = 0;
    const Fail fail = [&source_name, &lineno](const std::string& msg) {
        throw ValidationError(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };

    using Setter = std::function<void(const std::string&)>;
    std::map<std::string, std::map<std::string, Setter>> sections;

    auto num = [&fail](double& slot) {
        return [&slot, &fail](const std::string& raw) { slot = parse_number(raw, fail); };
    };
    auto cnt = [&fail](std::size_t& slot) {
        return [&slot, &fail](const std::string& raw) {
            slot = static_cast<std::size_t>(parse_unsigned(raw, fail));
        };
    };
    auto bol = [&fail](bool& slot) {
        return [&slot, &fail](const std::string& raw) { slot = parse_bool(raw, fail); };
    };

    auto& scen = sections["scenario"];
    ScenarioConfig& sc = cfg.scenario;
    scen["service1_users"] = cnt(sc.service1_users);
    scen["service2_users"] = cnt(sc.service2_users);
    scen["sbs_count"] = cnt(sc.sbs_count);
    scen["area_m"] = num(sc.area_m);
    scen["hit_ratio"] = num(sc.hit_ratio);
    scen["ensure_feasible"] = bol(sc.ensure_feasible);
    scen["max_placement_attempts"] = cnt(sc.max_placement_attempts);
    scen["content_count"] = cnt(sc.content_count);
    scen["zipf_exponent"] = num(sc.zipf_exponent);
    scen["content_size_bits"] = num(sc.content_size_bits);
    scen["cache_capacity_bits"] = num(sc.cache_capacity_bits);
    scen["mec_speed_cps"] = num(sc.mec_speed_cps);
    scen["rate_requirement_bps"] = num(sc.rate_requirement_bps);

    auto& radio = sections["scenario.radio"];
    radio["sbs_tx_power_w"] = num(sc.radio.sbs_tx_power_w);
    radio["mbs_total_power_w"] = num(sc.radio.mbs_total_power_w);
    radio["ue_tx_power_w"] = num(sc.radio.ue_tx_power_w);
    radio["noise_power_w"] = num(sc.radio.noise_power_w);
    radio["residual_si_gain"] = num(sc.radio.residual_si_gain);
    radio["dl_bandwidth_hz"] = num(sc.radio.dl_bandwidth_hz);
    radio["ul_bandwidth_hz"] = num(sc.radio.ul_bandwidth_hz);

    auto& pl = sections["scenario.pathloss"];
    pl["fixed_db"] = num(sc.pathloss.fixed_db);
    pl["slope_db"] = num(sc.pathloss.slope_db);
    pl["min_distance_m"] = num(sc.pathloss.min_distance_m);
    pl["rayleigh_fading"] = bol(sc.pathloss.rayleigh_fading);

    auto& task = sections["scenario.task"];
    task["input_bits"] = num(sc.task.input_bits);
    task["cpu_cycles"] = num(sc.task.cpu_cycles);
    task["local_speed_cps"] = num(sc.task.local_speed_cps);
    task["local_power_w"] = num(sc.task.local_power_w);
    task["deadline_s"] = num(sc.task.deadline_s);
    task["uplink_deadline_s"] = num(sc.task.uplink_deadline_s);

    auto& c1 = sections["scenario.coeffs1"];
    c1["alpha"] = num(sc.coeffs1.alpha);
    c1["beta"] = num(sc.coeffs1.beta);
    c1["gamma"] = num(sc.coeffs1.gamma);
    c1["eta_per_bit"] = num(sc.coeffs1.eta_per_bit);
    c1["epsilon"] = num(sc.coeffs1.epsilon);

    auto& c2 = sections["scenario.coeffs2"];
    c2["psi"] = num(sc.coeffs2.psi);
    c2["theta"] = num(sc.coeffs2.theta);
    c2["phi"] = num(sc.coeffs2.phi);
    c2["vartheta_per_cps"] = num(sc.coeffs2.vartheta_per_cps);

    auto& solver = sections["solver"];
    solver["rho"] = num(cfg.solver.rho);
    solver["tol_primal"] = num(cfg.solver.tol_primal);
    solver["tol_dual"] = num(cfg.solver.tol_dual);
    solver["max_iter"] = cnt(cfg.solver.max_iter);
    solver["residual_balancing"] = bol(cfg.solver.residual_balancing);
    solver["assembled_tol"] = num(cfg.solver.assembled_tol);

    auto& sweep = sections["sweep"];
    SweepSection& sw = cfg.sweep;
    sweep["param"] = [&sw, &fail](const std::string& raw) {
        try {
            sw.param = sweep_param_from_string(parse_string(raw, fail));
        } catch (const ValidationError& ex) {
            fail(ex.what());
        }
    };
    sweep["grid"] = [&sw, &fail](const std::string& raw) {
        sw.grid.clear();
        for (const std::string& item : parse_array(raw, fail)) {
            sw.grid.push_back(parse_number(item, fail));
        }
    };
    sweep["seeds"] = [&sw, &fail](const std::string& raw) {
        sw.seeds = static_cast<std::size_t>(parse_unsigned(raw, fail));
        if (sw.seeds == 0) fail("seeds must be at least 1");
    };
    sweep["base_seed"] = [&sw, &fail](const std::string& raw) {
        sw.base_seed = parse_unsigned(raw, fail);
    };
    sweep["schemes"] = [&sw, &fail](const std::string& raw) {
        sw.schemes.clear();
        for (const std::string& item : parse_array(raw, fail)) {
            try {
                sw.schemes.push_back(scheme_from_string(parse_string(item, fail)));
            } catch (const ValidationError& ex) {
                fail(ex.what());
            }
        }
    };

    std::istringstream is(text);
    std::string line;
    std::string section;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail("unterminated section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            if (sections.find(section) == sections.end()) {
                fail("unknown section [" + section + "]");
            }
            if (section == "sweep") cfg.sweep.present = true;
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) fail("missing key before '='");
        if (value.empty()) fail("missing value for key '" + key + "'");
        if (section.empty()) fail("key '" + key + "' appears before any [section]");
        const auto& table = sections.at(section);
        const auto it = table.find(key);
        if (it == table.end()) fail("unknown key '" + key + "' in [" + section + "]");
        it->second(value);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read config file '" + path + "'");
    return parse_config(buf.str(), path);
}

std::string default_config_text() {
    const RunConfig cfg;
    const ScenarioConfig& sc = cfg.scenario;
    std::ostringstream os;
    auto num = [&os](const char* key, double v, const char* note = nullptr) {
        os << key << " = " << fmt_double(v);
        if (note) os << " # " << note;
        os << '\n';
    };
    auto cnt = [&os](const char* key, std::size_t v) { os << key << " = " << v << '\n'; };
    auto bol = [&os](const char* key, bool v) {
        os << key << " = " << (v ? "true" : "false") << '\n';
    };

    os << "# Full-duplex small-cell caching/offloading planner: every setting with its default.\n";
    os << "\n[scenario]\n";
    cnt("service1_users", sc.service1_users);
    cnt("service2_users", sc.service2_users);
    cnt("sbs_count", sc.sbs_count);
    num("area_m", sc.area_m, "side of the square deployment area");
    num("hit_ratio", sc.hit_ratio, "target mean cache-hit probability");
    bol("ensure_feasible", sc.ensure_feasible);
    cnt("max_placement_attempts", sc.max_placement_attempts);
    cnt("content_count", sc.content_count);
    num("zipf_exponent", sc.zipf_exponent);
    num("content_size_bits", sc.content_size_bits);
    num("cache_capacity_bits", sc.cache_capacity_bits, "per cell");
    num("mec_speed_cps", sc.mec_speed_cps, "edge compute capability per cell, cycles/s");
    num("rate_requirement_bps", sc.rate_requirement_bps, "per download user");

    os << "\n[scenario.radio]\n";
    num("sbs_tx_power_w", sc.radio.sbs_tx_power_w);
    num("mbs_total_power_w", sc.radio.mbs_total_power_w);
    num("ue_tx_power_w", sc.radio.ue_tx_power_w);
    num("noise_power_w", sc.radio.noise_power_w);
    num("residual_si_gain", sc.radio.residual_si_gain,
        "self-interference leakage after cancellation");
    num("dl_bandwidth_hz", sc.radio.dl_bandwidth_hz);
    num("ul_bandwidth_hz", sc.radio.ul_bandwidth_hz);

    os << "\n[scenario.pathloss]\n";
    num("fixed_db", sc.pathloss.fixed_db);
    num("slope_db", sc.pathloss.slope_db, "dB per decade of distance in km");
    num("min_distance_m", sc.pathloss.min_distance_m);
    bol("rayleigh_fading", sc.pathloss.rayleigh_fading);

    os << "\n[scenario.task]\n";
    num("input_bits", sc.task.input_bits);
    num("cpu_cycles", sc.task.cpu_cycles);
    num("local_speed_cps", sc.task.local_speed_cps);
    num("local_power_w", sc.task.local_power_w);
    num("deadline_s", sc.task.deadline_s);
    num("uplink_deadline_s", sc.task.uplink_deadline_s);

    os << "\n[scenario.coeffs1]\n";
    num("alpha", sc.coeffs1.alpha, "revenue per log unit of access rate");
    num("beta", sc.coeffs1.beta, "revenue per log unit of backhaul-free rate");
    num("gamma", sc.coeffs1.gamma, "cost per Hz of downlink band");
    num("eta_per_bit", sc.coeffs1.eta_per_bit, "cost per refreshed bit");
    num("epsilon", sc.coeffs1.epsilon, "cost per watt of backhaul power");

    os << "\n[scenario.coeffs2]\n";
    num("psi", sc.coeffs2.psi, "revenue per log unit of uplink rate");
    num("theta", sc.coeffs2.theta, "revenue per joule of saved handset energy");
    num("phi", sc.coeffs2.phi, "cost per Hz of uplink band");
    num("vartheta_per_cps", sc.coeffs2.vartheta_per_cps, "cost per cycle/s of edge compute");

    os << "\n[solver]\n";
    num("rho", cfg.solver.rho, "consensus penalty weight");
    num("tol_primal", cfg.solver.tol_primal, "negative = auto-scale with problem size");
    num("tol_dual", cfg.solver.tol_dual, "negative = auto-scale with problem size");
    cnt("max_iter", cfg.solver.max_iter);
    bol("residual_balancing", cfg.solver.residual_balancing);
    num("assembled_tol", cfg.solver.assembled_tol, "feasibility gate on the assembled point");

    os << "\n[sweep]\n";
    os << "param = \"" << to_string(cfg.sweep.param) << "\" # user_pairs | sbs_count | hit_ratio\n";
    os << "grid = [";
    for (std::size_t i = 0; i < cfg.sweep.grid.size(); ++i) {
        if (i) os << ", ";
        os << fmt_double(cfg.sweep.grid[i]);
    }
    os << "]\n";
    cnt("seeds", cfg.sweep.seeds);
    os << "base_seed = " << cfg.sweep.base_seed << '\n';
    os << "schemes = [";
    for (std::size_t i = 0; i < cfg.sweep.schemes.size(); ++i) {
        if (i) os << ", ";
        os << '"' << to_string(cfg.sweep.schemes[i]) << '"';
    }
    os << "]\n";
    return os.str();
}

} // namespace fdmec
