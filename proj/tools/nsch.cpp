// nsch: command line driver.
//
//   nsch run            --config FILE [--set key=value ...]
//   nsch stationary     --config FILE [--set ...]
//   nsch obstacle-limit --config FILE [--set ...]
//   nsch weakstrong     --config FILE [--set ...]
//   nsch check
//
// Exit codes: 0 success, 2 configuration error, 3 solver or I/O failure,
// 4 self-check failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsch/cahn_hilliard.hpp"
#include "nsch/config.hpp"
#include "nsch/coupled.hpp"
#include "nsch/errors.hpp"
#include "nsch/io.hpp"
#include "nsch/obstacle_limit.hpp"
#include "nsch/self_check.hpp"
#include "nsch/stationary.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kCheckFailed = 4;

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
};

nsch::Config load(const Options& opts, bool require_time) {
    nsch::ConfigEntries entries;
    if (!opts.config_path.empty()) entries = nsch::read_entries(opts.config_path);
    nsch::ConfigEntries overrides;
    for (const auto& s : opts.overrides) overrides.push_back(nsch::parse_override(s));
    nsch::Config cfg = nsch::build_config(entries, overrides, require_time);
    nsch::apply_environment(cfg);
    return cfg;
}

std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%08ld.bin", step);
    return buf;
}

int cmd_run(const Options& opts) {
    nsch::Config cfg = load(opts, true);
    nsch::validate(cfg.run, cfg.params);
    nsch::State initial = nsch::make_initial_state(cfg.run, cfg.params);
    nsch::check_cfl(initial.u, cfg.run.dt);

    nsch::ensure_directory(cfg.output_dir);
    nsch::CsvWriter csv(cfg.output_dir / "diagnostics.csv");
    nsch::RunObserver observer;
    observer.on_record = [&](const nsch::DiagnosticsRecord& r) { csv.write(r); };
    observer.on_snapshot = [&](long step, const nsch::State& s) {
        nsch::write_snapshot(cfg.output_dir / snapshot_name(step), s);
    };
    nsch::RunConfig run_cfg = cfg.run;
    run_cfg.keep_snapshots = false;
    try {
        const nsch::RunResult result = nsch::run_from(std::move(initial), run_cfg, cfg.params, observer);
        csv.flush();
        const auto& last = result.series.back();
        std::cout << "steps " << result.series.size() - 1 << "  t " << last.t << "  E_total " << last.E_total
                  << "  u_L2 " << last.u_L2 << "  sep_delta " << last.sep_delta << '\n';
    } catch (...) {
        csv.flush();
        throw;
    }
    return kOk;
}

int cmd_stationary(const Options& opts) {
    nsch::Config cfg = load(opts, false);
    nsch::ScalarField guess(cfg.run.grid);
    if (!cfg.stationary_snapshot.empty()) {
        guess = nsch::read_snapshot(cfg.stationary_snapshot, cfg.run.grid).phi;
    } else {
        guess = nsch::make_initial_phase(cfg.run.grid, cfg.run.init.phase);
    }
    nsch::StationaryOptions sopts;
    sopts.tol = cfg.stationary_tol;
    const auto sol = nsch::stationary_solve(guess, nsch::mean(guess), cfg.params.potential, sopts);

    nsch::State out(cfg.run.grid);
    out.phi = sol.phi_inf;
    out.mu = nsch::ScalarField(cfg.run.grid, sol.mu_inf);
    nsch::ensure_directory(cfg.output_dir);
    nsch::write_snapshot(cfg.output_dir / "stationary.bin", out);
    std::cout << "iterations " << sol.iterations << "  residual " << sol.residual << "  mu_inf " << sol.mu_inf
              << "  separation " << sol.separation << '\n';
    return kOk;
}

int cmd_obstacle_limit(const Options& opts) {
    nsch::Config cfg = load(opts, true);
    nsch::ObstacleLimitConfig oc{
        .k_list = cfg.k_list,
        .horizon = cfg.obstacle_horizon,
        .theta0 = nsch::theta0_of(cfg.params.potential),
        .phi0 = nsch::make_initial_phase(cfg.run.grid, cfg.run.init.phase),
        .ch = cfg.run.ch,
    };
    oc.ch.dt = cfg.run.dt;
    if (const auto* obstacle = std::get_if<nsch::DoubleObstacle>(&cfg.params.potential)) oc.c = obstacle->c;
    const auto report = nsch::theta_limit_study(oc);

    nsch::ensure_directory(cfg.output_dir);
    const auto path = cfg.output_dir / "theta_limit.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw nsch::IoError("cannot open " + path.string() + " for writing");
    out << "k,theta,error,regularize_residual,initial_separation\n";
    bool failed = false;
    for (const auto& e : report.entries) {
        out << e.k << ',' << nsch::format_double(e.theta) << ',' << nsch::format_double(e.error) << ','
            << nsch::format_double(e.regularize_residual) << ',' << nsch::format_double(e.initial_separation)
            << '\n';
        std::cout << "k " << e.k << "  error " << e.error;
        if (!e.failure.empty()) {
            std::cout << "  failed: " << e.failure;
            failed = true;
        }
        std::cout << '\n';
    }
    if (!out) throw nsch::IoError("write error on " + path.string());
    std::cout << "strictly decreasing: " << (report.strictly_decreasing ? "yes" : "no") << '\n';
    return failed ? kSolverError : kOk;
}

int cmd_weakstrong(const Options& opts) {
    nsch::Config cfg = load(opts, true);
    nsch::validate(cfg.run, cfg.params);
    const auto runs = nsch::weak_strong_experiment(cfg.run, cfg.params, cfg.weakstrong_epsilon, cfg.weakstrong_seed);

    nsch::ensure_directory(cfg.output_dir);
    const auto path = cfg.output_dir / "weakstrong.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw nsch::IoError("cannot open " + path.string() + " for writing");
    out << "epsilon,t,D\n";
    for (const auto& r : runs) {
        for (const auto& d : r.distance) {
            out << nsch::format_double(r.epsilon) << ',' << nsch::format_double(d.t) << ','
                << nsch::format_double(d.D) << '\n';
        }
        if (!r.distance.empty()) std::cout << "epsilon " << r.epsilon << "  D(T) " << r.distance.back().D << '\n';
    }
    if (!out) throw nsch::IoError("write error on " + path.string());
    return kOk;
}

int cmd_check(const Options& opts) {
    // A configuration, when given, must parse; the checks themselves are fixed.
    if (!opts.config_path.empty() || !opts.overrides.empty()) load(opts, false);
    bool ok = true;
    for (const auto& r : nsch::run_self_checks()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.value << (r.at_least ? " >= " : " <= ")
                  << r.threshold << '\n';
        ok = ok && r.passed;
    }
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes-Cahn-Hilliard simulator"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opts.config_path, "key = value configuration file");
        sub->add_option("-s,--set", opts.overrides, "override a key (key=value)")->take_all();
    };
    CLI::App* run = app.add_subcommand("run", "coupled time integration");
    CLI::App* stationary = app.add_subcommand("stationary", "stationary Cahn-Hilliard solve");
    CLI::App* obstacle = app.add_subcommand("obstacle-limit", "theta -> 0 convergence study");
    CLI::App* weakstrong = app.add_subcommand("weakstrong", "perturbation distance experiment");
    CLI::App* check = app.add_subcommand("check", "operator self-tests");
    for (CLI::App* sub : {run, stationary, obstacle, weakstrong}) add_common(sub);
    add_common(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(opts);
        if (stationary->parsed()) return cmd_stationary(opts);
        if (obstacle->parsed()) return cmd_obstacle_limit(opts);
        if (weakstrong->parsed()) return cmd_weakstrong(opts);
        return cmd_check(opts);
    } catch (const nsch::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const nsch::GridMismatch& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverError;
    }
}
