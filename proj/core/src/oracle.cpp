#include "spinlang/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spinlang/errors.hpp"
#include "spinlang/observables.hpp"

namespace spinlang::oracle {

std::uint64_t state_count(int side, int state_len) {
    if (side < 3) throw std::invalid_argument("oracle requires side >= 3");
    if (state_len < 1) throw std::invalid_argument("state length must be >= 1");
    const auto bits = static_cast<std::uint64_t>(side) * side * state_len;
    if (bits > 63 || (std::uint64_t{1} << bits) > max_states) {
        throw ResourceError("oracle state space 2^" + std::to_string(bits) +
                            " exceeds the guard of 2^" +
                            std::to_string(std::countr_zero(max_states)) + " configurations");
    }
    return std::uint64_t{1} << bits;
}

std::uint64_t encode(const Lattice& lattice) {
    if (lattice.spin_count() > 64) throw std::invalid_argument("lattice too large to encode");
    std::uint64_t id = 0;
    int bit = 0;
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        for (int k = 0; k < lattice.state_len(); ++k, ++bit) {
            if (lattice.spin(n, k) > 0) id |= std::uint64_t{1} << bit;
        }
    }
    return id;
}

Lattice decode(std::uint64_t id, int side, int state_len) {
    Lattice lattice(side, state_len);
    if (lattice.spin_count() > 64) throw std::invalid_argument("lattice too large to decode");
    int bit = 0;
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        for (int k = 0; k < state_len; ++k, ++bit) {
            if (((id >> bit) & 1U) == 0) lattice.flip(n, k);
        }
    }
    return lattice;
}

double hamiltonian(const Lattice& lattice) {
    std::int64_t sum = 0;
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        const auto nb = neighbor_slots(x, lattice.side());
        sum += lattice.dot(x, nb[1]) + lattice.dot(x, nb[3]);
    }
    return -coupling * static_cast<double>(sum);
}

std::vector<double> boltzmann_distribution(int side, int state_len, Temperature t) {
    const std::uint64_t states = state_count(side, state_len);
    std::vector<double> h(states);
    for (std::uint64_t a = 0; a < states; ++a) h[a] = hamiltonian(decode(a, side, state_len));
    const double h_min = *std::min_element(h.begin(), h.end());
    const double temp = t.value();
    std::vector<double> w(states);
    for (std::uint64_t a = 0; a < states; ++a) {
        if (temp == 0.0) {
            w[a] = h[a] == h_min ? 1.0 : 0.0;
        } else if (std::isinf(temp)) {
            w[a] = 1.0;
        } else {
            w[a] = std::exp(-(h[a] - h_min) / temp);
        }
    }
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= z;
    return w;
}

BoltzmannExpectations exact_boltzmann(int side, int state_len, Temperature t) {
    const std::vector<double> pi = boltzmann_distribution(side, state_len, t);
    BoltzmannExpectations out;
    out.edge_histogram.assign(state_len + 1, 0.0);
    double e1 = 0.0;
    double e2 = 0.0;
    for (std::uint64_t a = 0; a < pi.size(); ++a) {
        if (pi[a] == 0.0) continue;
        const Lattice lattice = decode(a, side, state_len);
        const double e = energy_ordinary(lattice);
        e1 += pi[a] * e;
        e2 += pi[a] * e * e;
        const HammingHistogram hist = edge_hamming_histogram(lattice);
        for (std::size_t d = 0; d < hist.probs.size(); ++d) out.edge_histogram[d] += pi[a] * hist.probs[d];
    }
    out.mean_energy = e1;
    out.energy_variance = std::max(0.0, e2 - e1 * e1);
    for (std::size_t d = 0; d < out.edge_histogram.size(); ++d) {
        out.mean_edge_distance += static_cast<double>(d) * out.edge_histogram[d];
    }
    return out;
}

TransitionMatrix::TransitionMatrix(int bits, std::vector<double> flip_probs)
    : bits_(bits), flips_(std::move(flip_probs)) {
    if (bits < 1 || bits > 40) throw std::invalid_argument("transition matrix bit count out of range");
    if (flips_.size() != size() * static_cast<std::uint64_t>(bits)) {
        throw std::invalid_argument("flip probability table has the wrong size");
    }
    stay_.resize(size());
    for (std::uint64_t a = 0; a < size(); ++a) {
        double out = 0.0;
        for (int b = 0; b < bits_; ++b) {
            const double p = flip(a, b);
            if (!(p >= 0.0)) throw std::invalid_argument("negative transition probability");
            out += p;
        }
        if (out > 1.0 + 1e-12) throw std::invalid_argument("row flip mass exceeds 1");
        stay_[a] = std::max(0.0, 1.0 - out);
    }
}

double TransitionMatrix::operator()(std::uint64_t a, std::uint64_t b) const {
    if (a >= size() || b >= size()) throw std::invalid_argument("state index out of range");
    if (a == b) return stay(a);
    const std::uint64_t diff = a ^ b;
    if (std::popcount(diff) != 1) return 0.0;
    return flip(a, std::countr_zero(diff));
}

double TransitionMatrix::row_sum(std::uint64_t state) const {
    double s = stay(state);
    for (int b = 0; b < bits_; ++b) s += flip(state, b);
    return s;
}

std::vector<double> TransitionMatrix::left_multiply(std::span<const double> v) const {
    if (v.size() != size()) throw std::invalid_argument("vector size does not match chain");
    std::vector<double> w(size());
    for (std::uint64_t b = 0; b < size(); ++b) {
        double acc = v[b] * stay_[b];
        for (int bit = 0; bit < bits_; ++bit) {
            const std::uint64_t a = b ^ (std::uint64_t{1} << bit);
            acc += v[a] * flip(a, bit);
        }
        w[b] = acc;
    }
    return w;
}

namespace {

struct ChainGeometry {
    int side;
    int state_len;
    int nodes;
    int bits;
    std::uint64_t state_mask;
    std::vector<std::array<std::size_t, 4>> nbrs;

    ChainGeometry(int m, int l)
        : side(m), state_len(l), nodes(m * m), bits(m * m * l),
          state_mask(l >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << l) - 1) {
        for (int x = 0; x < nodes; ++x) nbrs.push_back(neighbor_slots(x, m));
    }

    int spin(std::uint64_t a, std::size_t node, int k) const {
        return ((a >> (node * state_len + k)) & 1U) != 0 ? 1 : -1;
    }
    std::uint64_t state(std::uint64_t a, std::size_t node) const {
        return (a >> (node * state_len)) & state_mask;
    }
};

double metropolis(double dE, double temp) {
    if (dE <= 0.0) return 1.0;
    return std::exp(-dE / temp);
}

void require_positive(Temperature t) {
    if (t.value() <= 0.0) throw std::invalid_argument("chain oracle requires T > 0");
}

}  // namespace

TransitionMatrix build_ordinary_chain(int side, int state_len, Temperature t) {
    require_positive(t);
    const std::uint64_t states = state_count(side, state_len);
    const ChainGeometry g(side, state_len);
    const double proposal = 1.0 / g.bits;
    std::vector<double> flips(states * g.bits);
    for (std::uint64_t a = 0; a < states; ++a) {
        for (int x = 0; x < g.nodes; ++x) {
            for (int k = 0; k < state_len; ++k) {
                int field = 0;
                for (std::size_t y : g.nbrs[x]) field += g.spin(a, y, k);
                const double dE = 2.0 / 4.0 * g.spin(a, x, k) * field;
                flips[a * g.bits + x * state_len + k] = proposal * metropolis(dE, t.value());
            }
        }
    }
    return TransitionMatrix(g.bits, std::move(flips));
}

TransitionMatrix build_preference_chain(int side, int state_len, Temperature t) {
    require_positive(t);
    const std::uint64_t states = state_count(side, state_len);
    const ChainGeometry g(side, state_len);
    const double proposal = 1.0 / g.bits;
    std::vector<double> flips(states * g.bits);
    for (std::uint64_t a = 0; a < states; ++a) {
        for (int x = 0; x < g.nodes; ++x) {
            std::array<int, 4> dist{};
            for (int j = 0; j < 4; ++j) {
                dist[j] = std::popcount(g.state(a, x) ^ g.state(a, g.nbrs[x][j]));
            }
            const int best = *std::min_element(dist.begin(), dist.end());
            const auto ties = std::count(dist.begin(), dist.end(), best);
            for (int k = 0; k < state_len; ++k) {
                double p = 0.0;
                for (int j = 0; j < 4; ++j) {
                    if (dist[j] != best) continue;
                    const double dE = 2.0 * g.spin(a, x, k) * g.spin(a, g.nbrs[x][j], k);
                    p += metropolis(dE, t.value()) / static_cast<double>(ties);
                }
                flips[a * g.bits + x * state_len + k] = proposal * p;
            }
        }
    }
    return TransitionMatrix(g.bits, std::move(flips));
}

StationaryResult stationary(const TransitionMatrix& p, double tol, std::int64_t max_iterations,
                            std::optional<std::vector<double>> start) {
    std::vector<double> v;
    if (start) {
        v = std::move(*start);
        if (v.size() != p.size()) throw std::invalid_argument("start vector size mismatch");
        const double s = std::accumulate(v.begin(), v.end(), 0.0);
        if (!(s > 0.0) || std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; })) {
            throw std::invalid_argument("start vector must be a non-negative, non-zero measure");
        }
        for (double& x : v) x /= s;
    } else {
        v.assign(p.size(), 1.0 / static_cast<double>(p.size()));
    }
    for (std::int64_t it = 0; it < max_iterations; ++it) {
        std::vector<double> w = p.left_multiply(v);
        double residual = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) residual += std::abs(w[i] - v[i]);
        if (residual < tol) return {std::move(v), it, residual};
        v = std::move(w);
    }
    throw ConvergenceError("power iteration did not reach residual " + std::to_string(tol) +
                           " within " + std::to_string(max_iterations) + " iterations");
}

double detailed_balance_residual(const TransitionMatrix& p, std::span<const double> pi) {
    if (pi.size() != p.size()) throw std::invalid_argument("distribution size mismatch");
    double worst = 0.0;
    for (std::uint64_t a = 0; a < p.size(); ++a) {
        for (int b = 0; b < p.bits(); ++b) {
            const std::uint64_t c = a ^ (std::uint64_t{1} << b);
            worst = std::max(worst, std::abs(pi[a] * p.flip(a, b) - pi[c] * p.flip(c, b)));
        }
    }
    return worst;
}

double expectation(std::span<const double> pi, int side, int state_len,
                   const std::function<double(const Lattice&)>& f) {
    double acc = 0.0;
    for (std::uint64_t a = 0; a < pi.size(); ++a) {
        if (pi[a] != 0.0) acc += pi[a] * f(decode(a, side, state_len));
    }
    return acc;
}

}  // namespace spinlang::oracle
