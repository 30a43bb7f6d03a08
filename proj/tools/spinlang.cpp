// Command line front end: run, sweep, hist, ea, oracle.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 resource guard,
// 5 numerical non-convergence.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "spinlang/csv.hpp"
#include "spinlang/dynamics.hpp"
#include "spinlang/errors.hpp"
#include "spinlang/harness.hpp"
#include "spinlang/lattice.hpp"
#include "spinlang/observables.hpp"
#include "spinlang/oracle.hpp"
#include "spinlang/snapshot.hpp"

namespace {

using namespace spinlang;

enum ExitCode { ok = 0, config_error = 2, io_error = 3, resource_error = 4, convergence_error = 5 };

struct RunArgs {
    std::string model = "ordinary";
    std::optional<int> side;
    std::optional<int> state_len;
    double temp = 0.0;
    std::int64_t sweeps = 0;
    std::uint64_t seed = 1;
    std::string init = "random";
    std::string snapshot_in;
    std::string snapshot_out;
};

struct EaArgs {
    int state_len = 5;
    int neighbors = 4;
    std::optional<std::int64_t> samples;
    std::uint64_t seed = 1;
};

struct OracleArgs {
    int side = 3;
    int state_len = 1;
    double temp = 1.0;
    std::string model = "ordinary";
    double tol = 1e-10;
    std::int64_t max_iterations = 10'000'000;
};

/// Flags shared by `sweep` and `hist`; each maps onto a config key.
struct ExperimentFlags {
    std::string config_path;
    std::string out;
    std::vector<std::pair<std::string, std::string>> settings;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { settings.emplace_back(key, v); }, help);
    }
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f, bool with_grid) {
    f.add(app, "--preset", "preset", "default or literal (25,000-attempt equilibration)");
    f.add(app, "--model", "model", "ordinary or preference");
    f.add(app, "--size", "size", "lattice side M");
    f.add(app, "--state-len", "state_len", "spins per node L");
    if (with_grid) {
        f.add(app, "--temp-grid", "temp_grid", "START:STOP:STEP");
        f.add(app, "--temps", "temps", "comma-separated temperatures");
    } else {
        f.add(app, "--temp", "hist_temp", "temperature");
    }
    f.add(app, "--trials", "trials", "independent trials per temperature");
    f.add(app, "--equil", "equil", "equilibration sweeps, or 'auto'");
    f.add(app, "--equil-attempts", "equil_attempts", "equilibration length in single attempts");
    f.add(app, "--equil-max", "equil_max", "cap for automatic equilibration (sweeps)");
    f.add(app, "--measure", "measure", "measurement sweeps");
    f.add(app, "--seed", "seed", "master seed");
    f.add(app, "--init", "init", "random or up");
    f.add(app, "--threads", "threads", "worker threads (0 = hardware)");
    app->add_option("--config", f.config_path, "key=value config file");
    app->add_option("--out", f.out, "output CSV (default stdout)");
}

harness::SweepConfig resolve(const ExperimentFlags& f, harness::SweepConfig base) {
    harness::SweepConfig c = f.config_path.empty() ? std::move(base)
                                                   : harness::load_config(f.config_path, std::move(base));
    for (const auto& [key, value] : f.settings) harness::apply_setting(c, key, value);
    return c;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        harness::write_file(path, text);
    }
}

int cmd_run(const RunArgs& a) {
    const ModelKind model = parse_model(a.model);
    const Temperature t(a.temp);
    Lattice lattice = [&] {
        if (!a.snapshot_in.empty()) {
            Lattice l = load_snapshot(a.snapshot_in);
            if ((a.side && *a.side != l.side()) || (a.state_len && *a.state_len != l.state_len())) {
                throw ConfigError("--size/--state-len disagree with the input snapshot");
            }
            return l;
        }
        if (!a.side || !a.state_len) throw ConfigError("run needs --size and --state-len (or --snapshot-in)");
        const InitMode mode = a.init == "up" ? InitMode::uniform_up
                              : a.init == "random" ? InitMode::random
                                                   : throw ConfigError("--init must be random or up");
        return init_lattice(*a.side, *a.state_len, mode, RngSeed{a.seed});
    }();
    Rng rng(RngSeed{mix64(a.seed)});
    run(lattice, model, t, a.sweeps, rng);
    if (!a.snapshot_out.empty()) save_snapshot(a.snapshot_out, lattice);

    const double e = energy(lattice, model);
    std::optional<double> centered;
    if (model == ModelKind::preference) {
        centered = centered_energy(e, asymptotic_energy_analytic(lattice.state_len(), 4));
    }
    std::cout << csv::observable_header << '\n';
    csv::write_row(std::cout, {to_string(model), lattice.side(), lattice.state_len(), a.temp, "0",
                               a.sweeps, e, centered, a.seed, "simulation"});
    return ok;
}

int cmd_sweep(const ExperimentFlags& f) {
    harness::SweepConfig c = resolve(f, harness::default_recipe(ModelKind::ordinary));
    const auto result = harness::temperature_sweep(c);
    emit(f.out.empty() ? c.output.string() : f.out, harness::format_sweep_csv(result));
    return ok;
}

int cmd_hist(const ExperimentFlags& f) {
    harness::SweepConfig base = harness::default_recipe(ModelKind::ordinary);
    base.histogram_temperature = 0.3;
    harness::SweepConfig c = resolve(f, std::move(base));
    const auto result = harness::histogram_run(c);
    emit(f.out.empty() ? c.histogram_output.string() : f.out, harness::format_histogram_csv(result));
    return ok;
}

int cmd_ea(const EaArgs& a) {
    const AsymptoticEnergy ea =
        a.samples ? asymptotic_energy_sampled(a.state_len, a.neighbors, *a.samples, RngSeed{a.seed})
                  : asymptotic_energy_analytic(a.state_len, a.neighbors);
    std::cout << "state_len,neighbors,method,value,std_error\n"
              << ea.state_len << ',' << ea.neighbors << ',' << (a.samples ? "sampled" : "analytic")
              << ',' << csv::number(ea.value) << ',' << csv::number(ea.std_error) << '\n';
    return ok;
}

int cmd_oracle(const OracleArgs& a) {
    const ModelKind model = parse_model(a.model);
    const Temperature t(a.temp);
    double e = 0.0;
    std::optional<double> centered;
    if (model == ModelKind::ordinary) {
        e = oracle::exact_boltzmann(a.side, a.state_len, t).mean_energy;
    } else {
        const auto chain = oracle::build_preference_chain(a.side, a.state_len, t);
        const auto st = oracle::stationary(chain, a.tol, a.max_iterations);
        e = oracle::expectation(st.distribution, a.side, a.state_len, energy_preference);
        centered = centered_energy(e, asymptotic_energy_analytic(a.state_len, 4));
    }
    std::cout << csv::observable_header << '\n';
    csv::write_row(std::cout,
                   {to_string(model), a.side, a.state_len, a.temp, "0", 0, e, centered, 0, "oracle"});
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled spin-vector lattice models of language evolution"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "run one chain and print its final energy");
    run_cmd->add_option("--model", run_args.model, "ordinary or preference")->capture_default_str();
    run_cmd->add_option("--size", run_args.side, "lattice side M");
    run_cmd->add_option("--state-len", run_args.state_len, "spins per node L");
    run_cmd->add_option("--temp", run_args.temp, "temperature")->required();
    run_cmd->add_option("--sweeps", run_args.sweeps, "sweeps (M*M*L attempts each)")->required();
    run_cmd->add_option("--seed", run_args.seed, "seed")->capture_default_str();
    run_cmd->add_option("--init", run_args.init, "random or up")->capture_default_str();
    run_cmd->add_option("--snapshot-in", run_args.snapshot_in, "start from this snapshot");
    run_cmd->add_option("--snapshot-out", run_args.snapshot_out, "write the final lattice here");

    ExperimentFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "temperature sweep with trial averaging");
    add_experiment_flags(sweep_cmd, sweep_flags, true);

    ExperimentFlags hist_flags;
    auto* hist_cmd = app.add_subcommand("hist", "Hamming-distance histograms at one temperature");
    add_experiment_flags(hist_cmd, hist_flags, false);

    EaArgs ea_args;
    auto* ea_cmd = app.add_subcommand("ea", "infinite-temperature preference energy");
    ea_cmd->add_option("--state-len", ea_args.state_len, "spins per node L")->capture_default_str();
    ea_cmd->add_option("--neighbors", ea_args.neighbors, "candidate neighbours n")->capture_default_str();
    ea_cmd->add_option("--samples", ea_args.samples, "Monte Carlo samples (analytic if absent)");
    ea_cmd->add_option("--seed", ea_args.seed, "seed for --samples")->capture_default_str();

    OracleArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle", "exact expectations on tiny lattices");
    oracle_cmd->add_option("--size", oracle_args.side, "lattice side M (>= 3)")->capture_default_str();
    oracle_cmd->add_option("--state-len", oracle_args.state_len, "spins per node L")->capture_default_str();
    oracle_cmd->add_option("--temp", oracle_args.temp, "temperature")->capture_default_str();
    oracle_cmd->add_option("--model", oracle_args.model, "ordinary or preference")->capture_default_str();
    oracle_cmd->add_option("--tol", oracle_args.tol, "power-iteration L1 tolerance")->capture_default_str();
    oracle_cmd->add_option("--max-iter", oracle_args.max_iterations, "power-iteration cap")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*run_cmd) return cmd_run(run_args);
        if (*sweep_cmd) return cmd_sweep(sweep_flags);
        if (*hist_cmd) return cmd_hist(hist_flags);
        if (*ea_cmd) return cmd_ea(ea_args);
        if (*oracle_cmd) return cmd_oracle(oracle_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return resource_error;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return convergence_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return config_error;
    }
    return config_error;
}
