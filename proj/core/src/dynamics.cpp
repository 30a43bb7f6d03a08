#include "spinlang/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spinlang {

std::string_view to_string(ModelKind kind) noexcept {
    return kind == ModelKind::ordinary ? "ordinary" : "preference";
}

ModelKind parse_model(std::string_view name) {
    if (name == "ordinary") return ModelKind::ordinary;
    if (name == "preference") return ModelKind::preference;
    throw std::invalid_argument("unknown model '" + std::string(name) +
                                "' (expected ordinary or preference)");
}

Temperature::Temperature(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0) {
        throw std::invalid_argument("temperature must be non-negative");
    }
}

Metropolis::Metropolis(Temperature t)
    : t_(t),
      p1_(t.value() == 0.0 ? 0.0 : std::exp(-1.0 / t.value())),
      p2_(t.value() == 0.0 ? 0.0 : std::exp(-2.0 / t.value())) {}

double Metropolis::acceptance(double dE) const noexcept {
    if (dE <= 0.0) return 1.0;
    if (dE == 1.0) return p1_;
    if (dE == 2.0) return p2_;
    if (t_.value() == 0.0) return 0.0;
    return std::exp(-dE / t_.value());
}

namespace {

struct Proposal {
    int row;
    int col;
    std::size_t node;
    int component;
};

inline Proposal propose(const Lattice& lattice, Rng& rng) {
    const auto side = static_cast<std::uint64_t>(lattice.side());
    const auto row = rng.below(side);
    const auto col = rng.below(side);
    const auto k = rng.below(static_cast<std::uint64_t>(lattice.state_len()));
    return {static_cast<int>(row), static_cast<int>(col), static_cast<std::size_t>(row * side + col),
            static_cast<int>(k)};
}

// dE = (2/n) s_x[k] sum_y s_y[k], n = 4.
inline StepOutcome ordinary_kernel(Lattice& lattice, const Metropolis& rule, Rng& rng) {
    const Proposal p = propose(lattice, rng);
    const auto nbrs = neighbor_slots(p.row, p.col, lattice.side());
    int field = 0;
    for (std::size_t y : nbrs) field += lattice.spin(y, p.component);
    const double dE = 0.5 * lattice.spin(p.node, p.component) * field;
    const bool accepted = rule.accept(dE, rng);
    if (accepted) lattice.flip(p.node, p.component);
    return {NodeIndex{p.row, p.col}, p.component, dE, accepted, std::nullopt};
}

// Neighbour chosen uniformly among those at minimal Hamming distance from the
// full current state; dE = 2 s_x[k] s_y*[k] (n = 1).
inline StepOutcome preference_kernel(Lattice& lattice, const Metropolis& rule, Rng& rng) {
    const Proposal p = propose(lattice, rng);
    const auto nbrs = neighbor_slots(p.row, p.col, lattice.side());
    std::array<int, 4> dist{};
    for (int j = 0; j < 4; ++j) dist[j] = lattice.hamming(p.node, nbrs[j]);
    const int best = std::min(std::min(dist[0], dist[1]), std::min(dist[2], dist[3]));
    unsigned ties = 0;  // bit j set iff neighbour j attains the minimum
    for (int j = 0; j < 4; ++j) ties |= static_cast<unsigned>(dist[j] == best) << j;
    const int count = std::popcount(ties);
    if (count > 1) {
        for (auto skip = rng.below(static_cast<std::uint64_t>(count)); skip > 0; --skip) ties &= ties - 1;
    }
    const std::size_t chosen = nbrs[std::countr_zero(ties)];
    const double dE = 2.0 * lattice.spin(p.node, p.component) * lattice.spin(chosen, p.component);
    const bool accepted = rule.accept(dE, rng);
    if (accepted) lattice.flip(p.node, p.component);
    const auto side = static_cast<std::size_t>(lattice.side());
    const NodeIndex chosen_index{static_cast<int>(chosen / side), static_cast<int>(chosen % side)};
    return {NodeIndex{p.row, p.col}, p.component, dE, accepted, chosen_index};
}

template <ModelKind Model>
void run_block(Lattice& lattice, const Metropolis& rule, std::int64_t attempts, Rng& rng) {
    for (std::int64_t a = 0; a < attempts; ++a) {
        if constexpr (Model == ModelKind::ordinary) {
            ordinary_kernel(lattice, rule, rng);
        } else {
            preference_kernel(lattice, rule, rng);
        }
    }
}

void run_block(Lattice& lattice, ModelKind model, const Metropolis& rule, std::int64_t attempts,
               Rng& rng) {
    if (model == ModelKind::ordinary) {
        run_block<ModelKind::ordinary>(lattice, rule, attempts, rng);
    } else {
        run_block<ModelKind::preference>(lattice, rule, attempts, rng);
    }
}

}  // namespace

StepOutcome ordinary_step(Lattice& lattice, const Metropolis& rule, Rng& rng) {
    return ordinary_kernel(lattice, rule, rng);
}

StepOutcome ordinary_step(Lattice& lattice, Temperature t, Rng& rng) {
    return ordinary_kernel(lattice, Metropolis(t), rng);
}

StepOutcome preference_step(Lattice& lattice, const Metropolis& rule, Rng& rng) {
    return preference_kernel(lattice, rule, rng);
}

StepOutcome preference_step(Lattice& lattice, Temperature t, Rng& rng) {
    return preference_kernel(lattice, Metropolis(t), rng);
}

std::int64_t attempts_per_sweep(const Lattice& lattice) noexcept {
    return static_cast<std::int64_t>(lattice.spin_count());
}

void run(Lattice& lattice, ModelKind model, Temperature t, std::int64_t sweeps, Rng& rng,
         const SweepHook& hook) {
    if (sweeps < 0) throw std::invalid_argument("sweeps must be >= 0");
    const Metropolis rule(t);
    const std::int64_t per_sweep = attempts_per_sweep(lattice);
    if (!hook) {
        run_block(lattice, model, rule, per_sweep * sweeps, rng);
        return;
    }
    for (std::int64_t s = 1; s <= sweeps; ++s) {
        run_block(lattice, model, rule, per_sweep, rng);
        hook(lattice, s);
    }
}

void run_attempts(Lattice& lattice, ModelKind model, Temperature t, std::int64_t attempts,
                  Rng& rng) {
    if (attempts < 0) throw std::invalid_argument("attempts must be >= 0");
    run_block(lattice, model, Metropolis(t), attempts, rng);
}

}  // namespace spinlang
