#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "spinlang/lattice.hpp"
#include "spinlang/rng.hpp"

namespace spinlang {

/// ordinary: every node couples to all four neighbours (n = 4).
/// preference: a node couples only to its Hamming-closest neighbour (n = 1).
enum class ModelKind { ordinary, preference };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts "ordinary" or "preference"; throws std::invalid_argument otherwise.
ModelKind parse_model(std::string_view name);

class Temperature {
public:
    /// Throws std::invalid_argument for negative or NaN values. +inf is allowed.
    explicit Temperature(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Metropolis acceptance with cached Boltzmann factors for the energy changes
/// the two models can produce (|dE| in {1, 2}).
class Metropolis {
public:
    explicit Metropolis(Temperature t);

    Temperature temperature() const noexcept { return t_; }

    /// min(1, exp(-dE/T)); at T = 0 this is 1 for dE <= 0 and 0 otherwise.
    double acceptance(double dE) const noexcept;

    /// Draws a uniform only when dE > 0.
    bool accept(double dE, Rng& rng) const {
        if (dE <= 0.0) return true;
        return rng.uniform() < acceptance(dE);
    }

private:
    Temperature t_;
    double p1_;
    double p2_;
};

struct StepOutcome {
    NodeIndex node;
    int component = 0;
    double dE = 0.0;
    bool accepted = false;
    /// Present iff the step used the preference rule.
    std::optional<NodeIndex> chosen_neighbor;
};

// Random draws per attempt, in order: node row, node column, component,
// [preference only, when several neighbours tie: the tie-break index],
// [only when dE > 0: the acceptance uniform].

StepOutcome ordinary_step(Lattice& lattice, const Metropolis& rule, Rng& rng);
StepOutcome ordinary_step(Lattice& lattice, Temperature t, Rng& rng);
StepOutcome preference_step(Lattice& lattice, const Metropolis& rule, Rng& rng);
StepOutcome preference_step(Lattice& lattice, Temperature t, Rng& rng);

/// Called after each completed sweep with the 1-based sweep index.
using SweepHook = std::function<void(const Lattice&, std::int64_t sweep)>;

/// One sweep is M*M*L attempts.
std::int64_t attempts_per_sweep(const Lattice& lattice) noexcept;

/// Runs `sweeps` sweeps in place. Throws std::invalid_argument for negative sweeps.
void run(Lattice& lattice, ModelKind model, Temperature t, std::int64_t sweeps, Rng& rng,
         const SweepHook& hook = {});

/// Runs a raw number of single-spin attempts in place.
void run_attempts(Lattice& lattice, ModelKind model, Temperature t, std::int64_t attempts,
                  Rng& rng);

}  // namespace spinlang
