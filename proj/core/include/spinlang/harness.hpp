#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinlang/dynamics.hpp"
#include "spinlang/lattice.hpp"
#include "spinlang/observables.hpp"
#include "spinlang/rng.hpp"

namespace spinlang::harness {

/// How long each trial runs before measurement starts.
struct Equilibration {
    enum class Mode { sweeps, attempts, automatic };

    Mode mode = Mode::automatic;
    /// Sweeps or raw attempts; in automatic mode, the minimum sweep count.
    std::int64_t count = 200;
    /// Automatic mode: hard cap on sweeps.
    std::int64_t max_sweeps = 20'000;
    /// Automatic mode: stop once the mean energy of the two halves of the last
    /// 20% of sweeps differs by less than this.
    double drift_tolerance = 0.005;

    static Equilibration sweeps(std::int64_t n) { return {Mode::sweeps, n}; }
    static Equilibration attempts(std::int64_t n) { return {Mode::attempts, n}; }
    static Equilibration automatic(std::int64_t min_sweeps = 200, std::int64_t max_sweeps = 20'000) {
        return {Mode::automatic, min_sweeps, max_sweeps};
    }
};

struct SweepConfig {
    ModelKind model = ModelKind::ordinary;
    int side = 50;
    int state_len = 5;
    std::vector<double> temperatures;
    int trials = 10;
    Equilibration equilibration;
    std::int64_t measurement_sweeps = 100;
    RngSeed seed{1};
    InitMode init = InitMode::random;
    /// 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// Record per-component ordinary energies each measurement sweep.
    bool track_components = false;
    /// histogram_run only.
    std::optional<double> histogram_temperature;
    std::filesystem::path output;
    std::filesystem::path histogram_output;

    /// Throws ConfigError describing the first violated constraint.
    void validate(bool require_grid = true) const;
};

/// M = 50, L = 5, 10 trials, T = 0.10, 0.15, ..., 1.50, automatic equilibration.
SweepConfig default_recipe(ModelKind model);
/// As default_recipe but with 25,000 attempts of equilibration.
SweepConfig literal_recipe(ModelKind model);

/// "START:STOP:STEP", inclusive of STOP when it lies on the grid. Throws ConfigError.
std::vector<double> parse_temperature_grid(std::string_view text);

/// Applies one key=value setting. Throws ConfigError for unknown keys or bad values.
void apply_setting(SweepConfig& config, std::string_view key, std::string_view value);
/// Reads a key=value file ('#' starts a comment). Throws IoError / ConfigError.
SweepConfig load_config(const std::filesystem::path& path, SweepConfig base = {});
SweepConfig parse_config(std::string_view text, SweepConfig base = {});

/// Per-run seed: mix64(master ^ mix64((t_index << 32) | trial)).
std::uint64_t derive_seed(RngSeed master, std::size_t t_index, int trial) noexcept;

/// Equilibrates according to `eq`; returns the number of sweeps run (attempt
/// mode reports whole sweeps, rounded down).
std::int64_t equilibrate(Lattice& lattice, ModelKind model, Temperature t, const Equilibration& eq,
                         Rng& rng);

struct TrialResult {
    std::size_t t_index = 0;
    double temperature = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::int64_t equilibration_sweeps = 0;
    std::int64_t measurement_sweeps = 0;
    double energy = 0.0;            ///< mean over measurement sweeps
    double energy_variance = 0.0;   ///< population variance over measurement sweeps
    std::optional<double> centered;  ///< preference model only
    std::vector<double> component_energy;  ///< when track_components
};

struct AggregateResult {
    std::size_t t_index = 0;
    double temperature = 0.0;
    double energy_mean = 0.0;
    double energy_sd = 0.0;  ///< sample standard deviation across trials
    std::optional<double> centered_mean;
    double energy_variance_mean = 0.0;  ///< trial-averaged within-run energy variance
};

struct SweepResult {
    SweepConfig config;
    std::vector<TrialResult> trials;  ///< ordered by (t_index, trial)
    std::vector<AggregateResult> aggregates;
};

SweepResult temperature_sweep(const SweepConfig& config);

/// Header, then for each temperature its trial rows followed by one aggregate row.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::string format_sweep_csv(const SweepResult& result);

struct HistogramResult {
    ModelKind model = ModelKind::ordinary;
    int side = 0;
    int state_len = 0;
    double temperature = 0.0;
    HammingHistogram edge;                      ///< trial-averaged
    std::optional<HammingHistogram> preferred;  ///< preference model only
    std::vector<double> trial_edge_means;
};

/// Requires config.histogram_temperature. When measurement_sweeps > 0 each
/// trial's histogram is averaged over the measurement window; otherwise it is
/// taken from the equilibrated lattice.
HistogramResult histogram_run(const SweepConfig& config);

void write_histogram_csv(std::ostream& out, const HistogramResult& result);
std::string format_histogram_csv(const HistogramResult& result);

/// Writes text to a file, throwing IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace spinlang::harness
