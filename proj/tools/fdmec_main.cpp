// Command-line front end: deployment generation, single-instance solves with
// optional JSON dumps, and multi-scheme experiment sweeps emitting CSV.
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 solver failure.

#include "fdmec/admm.hpp"
#include "fdmec/baselines.hpp"
#include "fdmec/config.hpp"
#include "fdmec/errors.hpp"
#include "fdmec/inner_solver.hpp"
#include "fdmec/problem.hpp"
#include "fdmec/recovery.hpp"
#include "fdmec/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fdmec::IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw fdmec::IoError("cannot write '" + path + "'");
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::size_t env_threads() {
    const char* raw = std::getenv("FDMEC_THREADS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const unsigned long v = std::strtoul(raw, &end, 10);
    if (end == raw || *end != '\0' || v == 0 || v > 4096) {
        throw fdmec::ValidationError("FDMEC_THREADS must be a positive integer, got '" +
                                     std::string(raw) + "'");
    }
    return static_cast<std::size_t>(v);
}

fdmec::RunConfig read_config(const std::string& path) {
    if (path.empty()) return fdmec::RunConfig{};
    return fdmec::load_config(path);
}

json assignment_json(const fdmec::IntegerAssignment& asg) {
    json j;
    j["assoc1"] = asg.assoc1;
    j["assoc2"] = asg.assoc2;
    std::vector<std::vector<int>> flags(asg.cache_flags.rows());
    for (std::size_t i = 0; i < asg.cache_flags.rows(); ++i) {
        flags[i].resize(asg.cache_flags.cols());
        for (std::size_t k = 0; k < asg.cache_flags.cols(); ++k) {
            flags[i][k] = asg.cache_flags(i, k);
        }
    }
    j["cache_flags"] = flags;
    return j;
}

int cmd_generate(const std::string& config_path, std::uint64_t seed, const std::string& out_path) {
    const fdmec::RunConfig cfg = read_config(config_path);
    const fdmec::Scenario scen = fdmec::generate_scenario(cfg.scenario, seed);
    write_file(out_path, fdmec::scenario_to_json(scen));
    std::cout << "cells: " << scen.cells.size() << '\n'
              << "service1_users: " << scen.users1.size() << '\n'
              << "service2_users: " << scen.users2.size() << '\n'
              << "wrote " << out_path << '\n';
    return 0;
}

int cmd_solve(const std::string& config_path, std::uint64_t seed, bool centralized,
              const std::string& trace_out, const std::string& solution_out) {
    const fdmec::RunConfig cfg = read_config(config_path);
    const fdmec::Scenario scen = fdmec::generate_scenario(cfg.scenario, seed);
    const fdmec::ProblemInstance inst = fdmec::build_instance(scen);

    fdmec::DecisionVars relaxed;
    std::string termination;
    std::size_t iterations = 0;
    std::string trace_json;
    if (centralized) {
        const fdmec::CentralizedResult res = fdmec::solve_centralized(inst);
        relaxed = res.vars;
        termination = fdmec::to_string(res.report.status);
        iterations = res.report.inner_iters;
        json t;
        t["mode"] = "centralized";
        t["objective_trace"] = res.report.objective_trace;
        t["pg_residual"] = res.report.pg_residual;
        t["max_violation"] = res.report.max_violation;
        t["outer_iters"] = res.report.outer_iters;
        trace_json = t.dump(2);
    } else {
        const fdmec::SolveReport rep = fdmec::admm_solve(inst, cfg.solver);
        relaxed = rep.vars;
        termination = rep.termination;
        iterations = rep.iterations;
        trace_json = fdmec::report_to_json(rep);
    }

    const fdmec::RecoveryResult rcv = fdmec::recover_solution(inst, relaxed);
    const double relaxed_res = fdmec::constraint_residuals(inst, relaxed).max_normalized();
    const double recovered_res =
        fdmec::assigned_residuals(inst, rcv.vars, rcv.assignment).max_normalized();

    std::cout << "mode: " << (centralized ? "centralized" : "consensus") << '\n'
              << "cells: " << inst.S << '\n'
              << "service1_users: " << inst.K1 << '\n'
              << "service2_users: " << inst.K2 << '\n'
              << "relaxed objective: " << fmt(fdmec::objective(inst, relaxed)) << '\n'
              << "recovered objective: " << fmt(rcv.objective) << '\n'
              << "integrality gap: " << fmt(rcv.integrality_gap) << '\n'
              << "iterations: " << iterations << '\n'
              << "termination: " << termination << '\n'
              << "relaxed residual: " << fmt(relaxed_res) << '\n'
              << "recovered residual: " << fmt(recovered_res) << '\n'
              << "saved backhaul bps: " << fmt(fdmec::saved_backhaul(inst, rcv.vars)) << '\n'
              << "dropped service1 users: " << rcv.dropped1.size() << '\n'
              << "dropped service2 users: " << rcv.dropped2.size() << '\n';

    if (!trace_out.empty()) write_file(trace_out, trace_json);
    if (!solution_out.empty()) {
        json j;
        j["relaxed"] = json::parse(fdmec::vars_to_json(relaxed));
        j["recovered"] = json::parse(fdmec::vars_to_json(rcv.vars));
        j["assignment"] = assignment_json(rcv.assignment);
        j["dropped1"] = rcv.dropped1;
        j["dropped2"] = rcv.dropped2;
        j["objective_relaxed"] = rcv.relaxed_objective;
        j["objective_recovered"] = rcv.objective;
        j["integrality_gap"] = rcv.integrality_gap;
        write_file(solution_out, j.dump(2));
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const fdmec::SweepSection& overrides,
              bool has_param, bool has_grid, bool has_seeds, bool has_base_seed, bool has_schemes,
              const std::string& out_path) {
    const fdmec::RunConfig cfg = read_config(config_path);
    fdmec::SweepSection sw = cfg.sweep;
    if (has_param) sw.param = overrides.param;
    if (has_grid) sw.grid = overrides.grid;
    if (has_seeds) sw.seeds = overrides.seeds;
    if (has_base_seed) sw.base_seed = overrides.base_seed;
    if (has_schemes) sw.schemes = overrides.schemes;

    fdmec::SweepSpec spec;
    spec.param = sw.param;
    spec.grid = sw.grid;
    spec.seeds_per_point = sw.seeds;
    spec.base_seed = sw.base_seed;
    spec.schemes = sw.schemes;
    spec.base = cfg.scenario;
    spec.admm = cfg.solver;
    spec.threads = env_threads();

    const fdmec::SweepResult result = fdmec::run_sweep(spec);
    write_file(out_path, fdmec::to_csv(result));

    const double frac = fdmec::success_fraction(result);
    std::cout << "rows: " << result.records.size() << '\n'
              << "success fraction: " << fmt(frac) << '\n'
              << "wrote " << out_path << '\n';
    for (const fdmec::SweepRecord& r : result.records) {
        if (!r.error.empty()) {
            std::cerr << "warning: " << fdmec::to_string(r.scheme) << " " << r.param << "="
                      << fmt(r.value) << " seed=" << r.seed << ": " << r.error << '\n';
        }
    }
    if (frac < 0.9) {
        std::cerr << "error: only " << fmt(100.0 * frac) << "% of sweep runs succeeded\n";
        return 3;
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Full-duplex small-cell caching and offloading planner"};
    app.require_subcommand(0, 1);
    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults,
                 "print every configuration key with its default value and exit");

    std::string gen_config, gen_out = "scenario.json";
    std::uint64_t gen_seed = 1;
    CLI::App* gen = app.add_subcommand("generate", "draw a deployment and write it as JSON");
    gen->add_option("--config", gen_config, "configuration file (defaults used when omitted)");
    gen->add_option("--seed", gen_seed, "deployment seed");
    gen->add_option("--out", gen_out, "output JSON path")->required();

    std::string solve_config, trace_out, solution_out;
    std::uint64_t solve_seed = 1;
    bool centralized = false;
    CLI::App* solve = app.add_subcommand("solve", "solve one deployment and report objectives");
    solve->add_option("--config", solve_config, "configuration file");
    solve->add_option("--seed", solve_seed, "deployment seed");
    solve->add_flag("--centralized", centralized,
                    "use the single-solver reference instead of cell consensus");
    solve->add_option("--trace-out", trace_out, "write iteration traces as JSON");
    solve->add_option("--solution-out", solution_out, "write relaxed/recovered variables as JSON");

    std::string sweep_config, sweep_out = "sweep.csv", sweep_param;
    fdmec::SweepSection overrides;
    std::vector<std::string> scheme_names;
    CLI::App* sweep = app.add_subcommand("sweep", "run scheme comparisons over a parameter grid");
    sweep->add_option("--config", sweep_config, "configuration file");
    CLI::Option* opt_param =
        sweep->add_option("--param", sweep_param, "swept parameter: user_pairs | sbs_count | hit_ratio");
    CLI::Option* opt_grid =
        sweep->add_option("--grid", overrides.grid, "swept values")->delimiter(',');
    CLI::Option* opt_seeds = sweep->add_option("--seeds", overrides.seeds, "seeds per grid point");
    CLI::Option* opt_base = sweep->add_option("--base-seed", overrides.base_seed, "seed offset");
    CLI::Option* opt_schemes =
        sweep->add_option("--schemes", scheme_names, "schemes: proposed | fd_only | cache_only")
            ->delimiter(',');
    sweep->add_option("--out", sweep_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    }

    if (print_defaults) {
        std::cout << fdmec::default_config_text();
        return 0;
    }
    if (gen->parsed()) return cmd_generate(gen_config, gen_seed, gen_out);
    if (solve->parsed()) {
        return cmd_solve(solve_config, solve_seed, centralized, trace_out, solution_out);
    }
    if (sweep->parsed()) {
        if (opt_param->count() > 0) overrides.param = fdmec::sweep_param_from_string(sweep_param);
        if (opt_schemes->count() > 0) {
            overrides.schemes.clear();
            for (const std::string& name : scheme_names) {
                overrides.schemes.push_back(fdmec::scheme_from_string(name));
            }
        }
        return cmd_sweep(sweep_config, overrides, opt_param->count() > 0, opt_grid->count() > 0,
                         opt_seeds->count() > 0, opt_base->count() > 0, opt_schemes->count() > 0,
                         sweep_out);
    }
    std::cout << app.help();
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fdmec::IoError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    } catch (const fdmec::ValidationError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    } catch (const fdmec::InfeasibleError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    } catch (const fdmec::SolverError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    }
}
