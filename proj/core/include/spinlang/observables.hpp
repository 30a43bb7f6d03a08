#pragma once

#include <cstdint>
#include <vector>

#include "spinlang/dynamics.hpp"
#include "spinlang/lattice.hpp"
#include "spinlang/rng.hpp"

namespace spinlang {

/// E = -(1/(4 M^2 L)) sum_x sum_{y in N(x)} s_x . s_y, every edge counted in both directions.
double energy_ordinary(const Lattice& lattice);

/// E = -(1/(M^2 L)) sum_x max_{y in N(x)} s_x . s_y.
double energy_preference(const Lattice& lattice);

/// Dispatches on the model.
double energy(const Lattice& lattice, ModelKind model);

/// Ordinary energy of the single-component sub-lattice k (an L = 1 Ising configuration).
double component_energy(const Lattice& lattice, int component);

/// Infinite-temperature limit of the preference energy for L-spin states and
/// n candidate neighbours.
struct AsymptoticEnergy {
    int state_len = 0;
    int neighbors = 0;
    double value = 0.0;
    /// Zero for the exact value; the Monte Carlo standard error otherwise.
    double std_error = 0.0;
};

/// (E - E_a) / (1 + E_a). Throws std::invalid_argument if E_a <= -1.
double centered_energy(double energy, const AsymptoticEnergy& ea);
double centered_energy(double energy, double ea);

/// Exact: E_a = -(1/L) E[max of n iid D], D = L - 2H, H ~ Binomial(L, 1/2),
/// evaluated in rational arithmetic. Throws std::invalid_argument for L < 1 or n < 1.
AsymptoticEnergy asymptotic_energy_analytic(int state_len, int neighbors);

/// Monte Carlo estimate of the same quantity from `samples` random draws.
AsymptoticEnergy asymptotic_energy_sampled(int state_len, int neighbors, std::int64_t samples,
                                           RngSeed seed);

struct HammingHistogram {
    /// probs[d] = fraction of counted pairs at Hamming distance d, d = 0..L.
    std::vector<double> probs;
    std::int64_t count = 0;

    double mean() const;
};

/// All 2 M^2 undirected torus edges, each once (the down and right edge of every node).
HammingHistogram edge_hamming_histogram(const Lattice& lattice);

/// One entry per node: distance to a closest neighbour. Ties are broken with `seed`.
HammingHistogram preferred_hamming_histogram(const Lattice& lattice, RngSeed seed);

/// Sizes of the 4-connected toroidal components of identical states, ascending.
std::vector<std::int64_t> same_state_clusters(const Lattice& lattice);

}  // namespace spinlang
