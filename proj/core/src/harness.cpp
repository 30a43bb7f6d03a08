#include "spinlang/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spinlang/csv.hpp"
#include "spinlang/errors.hpp"

namespace spinlang::harness {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
    }
    return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_number<double>(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

/// Runs job(i) for i in [0, n) across `threads` workers. The first exception is rethrown.
template <typename Job>
void parallel_for(std::size_t n, unsigned threads, Job job) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double mean_of(const std::vector<double>& xs, std::size_t from, std::size_t to) {
    return std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(from),
                           xs.begin() + static_cast<std::ptrdiff_t>(to), 0.0) /
           static_cast<double>(to - from);
}

}  // namespace

void SweepConfig::validate(bool require_grid) const {
    if (side < 2) throw ConfigError("size must be >= 2");
    if (state_len < 1) throw ConfigError("state_len must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (measurement_sweeps < 0) throw ConfigError("measure must be >= 0");
    if (equilibration.count < 0) throw ConfigError("equilibration length must be >= 0");
    if (equilibration.mode == Equilibration::Mode::automatic &&
        equilibration.max_sweeps < equilibration.count) {
        throw ConfigError("automatic equilibration cap is below its minimum");
    }
    if (require_grid) {
        if (temperatures.empty()) throw ConfigError("temperature grid is empty");
        for (std::size_t i = 0; i < temperatures.size(); ++i) {
            if (!(temperatures[i] >= 0.0)) throw ConfigError("temperatures must be >= 0");
            if (i > 0 && !(temperatures[i] > temperatures[i - 1])) {
                throw ConfigError("temperature grid must be strictly increasing");
            }
        }
    }
    if (histogram_temperature && !(*histogram_temperature >= 0.0)) {
        throw ConfigError("histogram temperature must be >= 0");
    }
}

std::vector<double> parse_temperature_grid(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
        throw ConfigError("temperature grid must be START:STOP:STEP, got '" + std::string(text) + "'");
    }
    const double start = parse_number<double>("temp-grid", trim(text.substr(0, c1)));
    const double stop = parse_number<double>("temp-grid", trim(text.substr(c1 + 1, c2 - c1 - 1)));
    const double step = parse_number<double>("temp-grid", trim(text.substr(c2 + 1)));
    if (!(step > 0.0)) throw ConfigError("temperature grid step must be > 0");
    if (start < 0.0 || stop < start) throw ConfigError("temperature grid needs 0 <= START <= STOP");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Snap to 1e-12 so 0.1 + 2 * 0.05 prints as 0.2.
        grid[i] = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
    }
    return grid;
}

SweepConfig default_recipe(ModelKind model) {
    SweepConfig c;
    c.model = model;
    c.side = 50;
    c.state_len = 5;
    c.trials = 10;
    c.temperatures = parse_temperature_grid("0.1:1.5:0.05");
    c.equilibration = Equilibration::automatic();
    c.measurement_sweeps = 100;
    return c;
}

SweepConfig literal_recipe(ModelKind model) {
    SweepConfig c = default_recipe(model);
    c.equilibration = Equilibration::attempts(25'000);
    return c;
}

void apply_setting(SweepConfig& c, std::string_view key, std::string_view value) {
    if (key == "preset") {
        const SweepConfig base = value == "literal" ? literal_recipe(c.model)
                                 : value == "default" ? default_recipe(c.model)
                                                      : throw ConfigError("unknown preset '" +
                                                                          std::string(value) + "'");
        const auto out = c.output;
        const auto hist = c.histogram_output;
        const auto seed = c.seed;
        const auto threads = c.threads;
        c = base;
        c.output = out;
        c.histogram_output = hist;
        c.seed = seed;
        c.threads = threads;
    } else if (key == "model") {
        try {
            c.model = parse_model(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "size") {
        c.side = parse_number<int>(key, value);
    } else if (key == "state_len") {
        c.state_len = parse_number<int>(key, value);
    } else if (key == "temp_grid") {
        c.temperatures = parse_temperature_grid(value);
    } else if (key == "temps") {
        c.temperatures = parse_list(key, value);
    } else if (key == "trials") {
        c.trials = parse_number<int>(key, value);
    } else if (key == "equil") {
        if (value == "auto") {
            c.equilibration = Equilibration::automatic(c.equilibration.count,
                                                       c.equilibration.max_sweeps);
        } else {
            c.equilibration = Equilibration::sweeps(parse_number<std::int64_t>(key, value));
        }
    } else if (key == "equil_attempts") {
        c.equilibration = Equilibration::attempts(parse_number<std::int64_t>(key, value));
    } else if (key == "equil_max") {
        c.equilibration.max_sweeps = parse_number<std::int64_t>(key, value);
    } else if (key == "measure") {
        c.measurement_sweeps = parse_number<std::int64_t>(key, value);
    } else if (key == "seed") {
        c.seed = RngSeed{parse_number<std::uint64_t>(key, value)};
    } else if (key == "init") {
        if (value == "random") {
            c.init = InitMode::random;
        } else if (value == "up") {
            c.init = InitMode::uniform_up;
        } else {
            throw ConfigError("init must be random or up");
        }
    } else if (key == "threads") {
        c.threads = parse_number<unsigned>(key, value);
    } else if (key == "hist_temp") {
        c.histogram_temperature = parse_number<double>(key, value);
    } else if (key == "out") {
        c.output = std::filesystem::path(std::string(value));
    } else if (key == "hist_out") {
        c.histogram_output = std::filesystem::path(std::string(value));
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

SweepConfig parse_config(std::string_view text, SweepConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        try {
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

SweepConfig load_config(const std::filesystem::path& path, SweepConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

std::uint64_t derive_seed(RngSeed master, std::size_t t_index, int trial) noexcept {
    const std::uint64_t job = (static_cast<std::uint64_t>(t_index) << 32) |
                              static_cast<std::uint32_t>(trial);
    return mix64(master.value ^ mix64(job));
}

std::int64_t equilibrate(Lattice& lattice, ModelKind model, Temperature t, const Equilibration& eq,
                         Rng& rng) {
    switch (eq.mode) {
        case Equilibration::Mode::sweeps:
            run(lattice, model, t, eq.count, rng);
            return eq.count;
        case Equilibration::Mode::attempts:
            run_attempts(lattice, model, t, eq.count, rng);
            return eq.count / attempts_per_sweep(lattice);
        case Equilibration::Mode::automatic:
            break;
    }
    std::vector<double> energies;
    const std::int64_t check_every = std::max<std::int64_t>(1, eq.count / 10);
    std::int64_t done = 0;
    while (done < eq.max_sweeps) {
        const std::int64_t chunk = done < eq.count ? eq.count - done : check_every;
        const std::int64_t n = std::min(chunk, eq.max_sweeps - done);
        run(lattice, model, t, n, rng,
            [&](const Lattice& l, std::int64_t) { energies.push_back(energy(l, model)); });
        done += n;
        if (done < eq.count) continue;
        const auto window = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.2 * done)));
        if (window > energies.size()) continue;
        const std::size_t start = energies.size() - window;
        const std::size_t mid = start + window / 2;
        const double drift =
            std::abs(mean_of(energies, mid, energies.size()) - mean_of(energies, start, mid));
        if (drift < eq.drift_tolerance) break;
    }
    return done;
}

namespace {

TrialResult run_trial(const SweepConfig& c, std::size_t t_index, int trial,
                      const std::optional<AsymptoticEnergy>& ea) {
    TrialResult r;
    r.t_index = t_index;
    r.temperature = c.temperatures[t_index];
    r.trial = trial;
    r.seed = derive_seed(c.seed, t_index, trial);
    r.measurement_sweeps = c.measurement_sweeps;

    const Temperature t(r.temperature);
    // Lattice init and dynamics draw from separate streams of the same run seed.
    Lattice lattice = init_lattice(c.side, c.state_len, c.init, RngSeed{r.seed});
    Rng rng(RngSeed{mix64(r.seed)});
    r.equilibration_sweeps = equilibrate(lattice, c.model, t, c.equilibration, rng);

    std::vector<double> samples;
    std::vector<double> components(c.track_components ? c.state_len : 0, 0.0);
    auto measure = [&](const Lattice& l) {
        samples.push_back(energy(l, c.model));
        for (int k = 0; k < static_cast<int>(components.size()); ++k) components[k] += component_energy(l, k);
    };
    if (c.measurement_sweeps == 0) {
        measure(lattice);
    } else {
        run(lattice, c.model, t, c.measurement_sweeps, rng,
            [&](const Lattice& l, std::int64_t) { measure(l); });
    }
    const double n = static_cast<double>(samples.size());
    r.energy = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : samples) ss += (e - r.energy) * (e - r.energy);
    r.energy_variance = ss / n;
    if (ea) r.centered = centered_energy(r.energy, *ea);
    for (double& e : components) e /= n;
    r.component_energy = std::move(components);
    return r;
}

}  // namespace

SweepResult temperature_sweep(const SweepConfig& config) {
    config.validate();
    std::optional<AsymptoticEnergy> ea;
    if (config.model == ModelKind::preference) ea = asymptotic_energy_analytic(config.state_len, 4);

    SweepResult result;
    result.config = config;
    const std::size_t n_t = config.temperatures.size();
    const auto n_trials = static_cast<std::size_t>(config.trials);
    result.trials.resize(n_t * n_trials);
    parallel_for(result.trials.size(), config.threads, [&](std::size_t job) {
        result.trials[job] =
            run_trial(config, job / n_trials, static_cast<int>(job % n_trials), ea);
    });

    for (std::size_t ti = 0; ti < n_t; ++ti) {
        AggregateResult agg;
        agg.t_index = ti;
        agg.temperature = config.temperatures[ti];
        const auto first = result.trials.begin() + static_cast<std::ptrdiff_t>(ti * n_trials);
        const auto last = first + static_cast<std::ptrdiff_t>(n_trials);
        double sum = 0.0;
        double var_sum = 0.0;
        double centered_sum = 0.0;
        for (auto it = first; it != last; ++it) {
            sum += it->energy;
            var_sum += it->energy_variance;
            if (it->centered) centered_sum += *it->centered;
        }
        agg.energy_mean = sum / static_cast<double>(n_trials);
        agg.energy_variance_mean = var_sum / static_cast<double>(n_trials);
        double ss = 0.0;
        for (auto it = first; it != last; ++it) ss += (it->energy - agg.energy_mean) * (it->energy - agg.energy_mean);
        agg.energy_sd = n_trials > 1 ? std::sqrt(ss / static_cast<double>(n_trials - 1)) : 0.0;
        if (ea) agg.centered_mean = centered_sum / static_cast<double>(n_trials);
        result.aggregates.push_back(agg);
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    const SweepConfig& c = result.config;
    out << csv::observable_header << '\n';
    const std::string_view model = to_string(c.model);
    const auto n_trials = static_cast<std::size_t>(c.trials);
    for (const AggregateResult& agg : result.aggregates) {
        for (std::size_t j = 0; j < n_trials; ++j) {
            const TrialResult& t = result.trials[agg.t_index * n_trials + j];
            csv::write_row(out, {model, c.side, c.state_len, t.temperature, std::to_string(t.trial),
                                 t.measurement_sweeps, t.energy, t.centered, t.seed, "simulation"});
        }
        csv::write_row(out, {model, c.side, c.state_len, agg.temperature,
                             "agg:sd=" + csv::number(agg.energy_sd), c.measurement_sweeps,
                             agg.energy_mean, agg.centered_mean, c.seed.value, "simulation"});
    }
}

std::string format_sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    write_sweep_csv(out, result);
    return out.str();
}

HistogramResult histogram_run(const SweepConfig& config) {
    config.validate(false);
    if (!config.histogram_temperature) throw ConfigError("histogram run needs a temperature");
    const Temperature t(*config.histogram_temperature);
    const bool preferred = config.model == ModelKind::preference;
    const std::size_t bins = static_cast<std::size_t>(config.state_len) + 1;

    struct TrialHist {
        std::vector<double> edge;
        std::vector<double> preferred;
        std::int64_t edge_count = 0;
        std::int64_t preferred_count = 0;
    };
    std::vector<TrialHist> per_trial(static_cast<std::size_t>(config.trials));

    parallel_for(per_trial.size(), config.threads, [&](std::size_t trial) {
        const std::uint64_t seed = derive_seed(config.seed, 0, static_cast<int>(trial));
        Lattice lattice = init_lattice(config.side, config.state_len, config.init, RngSeed{seed});
        Rng rng(RngSeed{mix64(seed)});
        equilibrate(lattice, config.model, t, config.equilibration, rng);

        TrialHist& th = per_trial[trial];
        th.edge.assign(bins, 0.0);
        th.preferred.assign(bins, 0.0);
        std::int64_t samples = 0;
        auto measure = [&](const Lattice& l, std::int64_t sweep) {
            const HammingHistogram e = edge_hamming_histogram(l);
            th.edge_count = e.count;
            for (std::size_t d = 0; d < bins; ++d) th.edge[d] += e.probs[d];
            if (preferred) {
                const HammingHistogram p = preferred_hamming_histogram(
                    l, RngSeed{mix64(seed ^ static_cast<std::uint64_t>(sweep))});
                th.preferred_count = p.count;
                for (std::size_t d = 0; d < bins; ++d) th.preferred[d] += p.probs[d];
            }
            ++samples;
        };
        if (config.measurement_sweeps == 0) {
            measure(lattice, 0);
        } else {
            run(lattice, config.model, t, config.measurement_sweeps, rng, measure);
        }
        for (double& x : th.edge) x /= static_cast<double>(samples);
        for (double& x : th.preferred) x /= static_cast<double>(samples);
    });

    HistogramResult r;
    r.model = config.model;
    r.side = config.side;
    r.state_len = config.state_len;
    r.temperature = t.value();
    r.edge.probs.assign(bins, 0.0);
    HammingHistogram pref;
    pref.probs.assign(bins, 0.0);
    const double trials = static_cast<double>(per_trial.size());
    for (const TrialHist& th : per_trial) {
        double m = 0.0;
        for (std::size_t d = 0; d < bins; ++d) {
            r.edge.probs[d] += th.edge[d] / trials;
            pref.probs[d] += th.preferred[d] / trials;
            m += static_cast<double>(d) * th.edge[d];
        }
        r.edge.count += th.edge_count;
        pref.count += th.preferred_count;
        r.trial_edge_means.push_back(m);
    }
    if (preferred) r.preferred = std::move(pref);
    return r;
}

void write_histogram_csv(std::ostream& out, const HistogramResult& r) {
    out << csv::histogram_header << '\n';
    const std::string_view model = to_string(r.model);
    auto emit = [&](const HammingHistogram& h, std::string_view kind) {
        for (std::size_t d = 0; d < h.probs.size(); ++d) {
            csv::write_row(out, {model, r.side, r.state_len, r.temperature, static_cast<int>(d),
                                 h.probs[d], kind});
        }
    };
    emit(r.edge, "edge");
    if (r.preferred) emit(*r.preferred, "preferred");
}

std::string format_histogram_csv(const HistogramResult& result) {
    std::ostringstream out;
    write_histogram_csv(out, result);
    return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing output file: " + path.string());
}

}  // namespace spinlang::harness
