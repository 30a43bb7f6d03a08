#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spinlang/dynamics.hpp"
#include "spinlang/lattice.hpp"

namespace spinlang::oracle {

// Exact ground truth for tiny lattices by exhaustive enumeration of all
// 2^(M^2 L) configurations.

/// Coupling of the per-component Ising Hamiltonian implied by the dynamics.
inline constexpr double coupling = 0.25;

/// Largest state space the enumeration routines accept.
inline constexpr std::uint64_t max_states = std::uint64_t{1} << 20;

/// Bit b of the index is spin (node b / L, component b % L); set bit means +1.
std::uint64_t encode(const Lattice& lattice);
Lattice decode(std::uint64_t id, int side, int state_len);

/// H = -J sum over undirected edges of s_x . s_y, J = 1/4.
double hamiltonian(const Lattice& lattice);

/// Throws ResourceError beyond max_states, std::invalid_argument for side < 3.
std::uint64_t state_count(int side, int state_len);

struct BoltzmannExpectations {
    double mean_energy = 0.0;      ///< <energy_ordinary>
    double energy_variance = 0.0;  ///< <E^2> - <E>^2
    std::vector<double> edge_histogram;  ///< expected edge Hamming distribution
    double mean_edge_distance = 0.0;
};

/// exp(-H/T) weights over every configuration, normalized. T = 0 gives the
/// uniform mixture over ground states; T = +inf the uniform distribution.
std::vector<double> boltzmann_distribution(int side, int state_len, Temperature t);

BoltzmannExpectations exact_boltzmann(int side, int state_len, Temperature t);

/// Markov kernel of a single-spin-flip chain: from any state only the
/// configurations differing in exactly one spin, or the state itself, are reachable.
/// Stored as S x bits flip probabilities plus the diagonal.
class TransitionMatrix {
public:
    /// flip_probs[a * bits + b] = P(a -> a ^ (1 << b)). The diagonal takes the
    /// remaining mass. Throws std::invalid_argument on negative entries or rows
    /// whose flip mass exceeds 1.
    TransitionMatrix(int bits, std::vector<double> flip_probs);

    int bits() const noexcept { return bits_; }
    std::uint64_t size() const noexcept { return std::uint64_t{1} << bits_; }

    double flip(std::uint64_t state, int bit) const noexcept {
        return flips_[state * static_cast<std::uint64_t>(bits_) + bit];
    }
    double stay(std::uint64_t state) const noexcept { return stay_[state]; }

    /// Generic entry P(a -> b).
    double operator()(std::uint64_t a, std::uint64_t b) const;

    double row_sum(std::uint64_t state) const;

    /// Returns v P.
    std::vector<double> left_multiply(std::span<const double> v) const;

private:
    int bits_;
    std::vector<double> flips_;
    std::vector<double> stay_;
};

/// Uniform node, uniform component, Metropolis acceptance with n = 4. Requires T > 0.
TransitionMatrix build_ordinary_chain(int side, int state_len, Temperature t);

/// Uniform node, uniform component, uniform choice among Hamming-closest
/// neighbours, Metropolis acceptance with n = 1. Requires T > 0.
TransitionMatrix build_preference_chain(int side, int state_len, Temperature t);

struct StationaryResult {
    std::vector<double> distribution;
    std::int64_t iterations = 0;
    double residual = 0.0;  ///< ||v P - v||_1 at exit
};

/// Power iteration from `start` (uniform if absent) until ||v P - v||_1 < tol.
/// Throws ConvergenceError when max_iterations is reached first.
StationaryResult stationary(const TransitionMatrix& p, double tol = 1e-10,
                            std::int64_t max_iterations = 10'000'000,
                            std::optional<std::vector<double>> start = std::nullopt);

/// max over single-flip pairs of |pi(a) P(a,b) - pi(b) P(b,a)|.
double detailed_balance_residual(const TransitionMatrix& p, std::span<const double> pi);

/// sum_a pi(a) f(decode(a)).
double expectation(std::span<const double> pi, int side, int state_len,
                   const std::function<double(const Lattice&)>& f);

}  // namespace spinlang::oracle
