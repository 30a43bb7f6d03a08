#include "spinlang/observables.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace spinlang {

double energy_ordinary(const Lattice& lattice) {
    // Sum each undirected edge once and double it.
    std::int64_t sum = 0;
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        const auto nb = neighbor_slots(x, lattice.side());
        sum += lattice.dot(x, nb[1]) + lattice.dot(x, nb[3]);
    }
    const double norm = 4.0 * static_cast<double>(lattice.spin_count());
    return -2.0 * static_cast<double>(sum) / norm;
}

double energy_preference(const Lattice& lattice) {
    std::int64_t sum = 0;
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        int best = -lattice.state_len();
        for (std::size_t y : neighbor_slots(x, lattice.side())) best = std::max(best, lattice.dot(x, y));
        sum += best;
    }
    return -static_cast<double>(sum) / static_cast<double>(lattice.spin_count());
}

double energy(const Lattice& lattice, ModelKind model) {
    return model == ModelKind::ordinary ? energy_ordinary(lattice) : energy_preference(lattice);
}

double component_energy(const Lattice& lattice, int component) {
    if (component < 0 || component >= lattice.state_len()) {
        throw std::invalid_argument("component out of range");
    }
    std::int64_t sum = 0;
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        const auto nb = neighbor_slots(x, lattice.side());
        const int s = lattice.spin(x, component);
        sum += s * (lattice.spin(nb[1], component) + lattice.spin(nb[3], component));
    }
    return -2.0 * static_cast<double>(sum) / (4.0 * static_cast<double>(lattice.node_count()));
}

double centered_energy(double energy, double ea) {
    if (!(ea > -1.0)) throw std::invalid_argument("asymptotic energy must be > -1");
    return (energy - ea) / (1.0 + ea);
}

double centered_energy(double energy, const AsymptoticEnergy& ea) {
    return centered_energy(energy, ea.value);
}

AsymptoticEnergy asymptotic_energy_analytic(int state_len, int neighbors) {
    using boost::multiprecision::cpp_int;
    using Rational = boost::multiprecision::cpp_rational;
    if (state_len < 1) throw std::invalid_argument("state length must be >= 1");
    if (neighbors < 1) throw std::invalid_argument("neighbour count must be >= 1");

    // D = L - 2H takes values -L, -L+2, ..., L; walk upward from H = L.
    // E[max] = sum_d d (F(d)^n - F(d-)^n), with F(d) = cumulative count / 2^L.
    const cpp_int total = cpp_int(1) << state_len;
    cpp_int binom = 1;  // C(L, H) for H = L
    cpp_int cumulative = 0;
    cpp_int prev_pow = 0;
    cpp_int weighted = 0;
    for (int h = state_len; h >= 0; --h) {
        cumulative += binom;
        const cpp_int pow = boost::multiprecision::pow(cumulative, neighbors);
        weighted += cpp_int(state_len - 2 * h) * (pow - prev_pow);
        prev_pow = pow;
        if (h > 0) binom = binom * h / (state_len - h + 1);
    }
    const Rational e_max(weighted, boost::multiprecision::pow(total, neighbors));
    const Rational ea = -e_max / state_len;
    return {state_len, neighbors, static_cast<double>(ea), 0.0};
}

AsymptoticEnergy asymptotic_energy_sampled(int state_len, int neighbors, std::int64_t samples,
                                           RngSeed seed) {
    if (state_len < 1) throw std::invalid_argument("state length must be >= 1");
    if (neighbors < 1) throw std::invalid_argument("neighbour count must be >= 1");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    Rng rng(seed);
    // Only the Hamming distance matters, and it is the popcount of an independent
    // uniform L-bit word for each neighbour.
    const int full_words = state_len / 64;
    const int tail = state_len % 64;
    auto random_distance = [&] {
        int d = 0;
        for (int w = 0; w < full_words; ++w) d += std::popcount(rng.next());
        if (tail != 0) d += std::popcount(rng.next() >> (64 - tail));
        return d;
    };
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        int best = state_len;
        for (int j = 0; j < neighbors; ++j) best = std::min(best, random_distance());
        const double x = -static_cast<double>(state_len - 2 * best) / state_len;
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
    }
    const double se =
        samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples))
                    : 0.0;
    return {state_len, neighbors, mean, se};
}

double HammingHistogram::mean() const {
    double m = 0.0;
    for (std::size_t d = 0; d < probs.size(); ++d) m += static_cast<double>(d) * probs[d];
    return m;
}

namespace {

HammingHistogram normalize(const std::vector<std::int64_t>& counts) {
    HammingHistogram h;
    h.count = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    h.probs.resize(counts.size());
    for (std::size_t d = 0; d < counts.size(); ++d) {
        h.probs[d] = static_cast<double>(counts[d]) / static_cast<double>(h.count);
    }
    return h;
}

}  // namespace

HammingHistogram edge_hamming_histogram(const Lattice& lattice) {
    std::vector<std::int64_t> counts(lattice.state_len() + 1, 0);
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        const auto nb = neighbor_slots(x, lattice.side());
        ++counts[lattice.hamming(x, nb[1])];
        ++counts[lattice.hamming(x, nb[3])];
    }
    return normalize(counts);
}

HammingHistogram preferred_hamming_histogram(const Lattice& lattice, RngSeed seed) {
    // The recorded distance is tie-invariant; the seed only fixes which attainer is picked.
    Rng rng(seed);
    std::vector<std::int64_t> counts(lattice.state_len() + 1, 0);
    for (std::size_t x = 0; x < lattice.node_count(); ++x) {
        int best = lattice.state_len() + 1;
        int ties = 0;
        std::array<std::size_t, 4> closest{};
        for (std::size_t y : neighbor_slots(x, lattice.side())) {
            const int d = lattice.hamming(x, y);
            if (d < best) {
                best = d;
                ties = 0;
            }
            if (d == best) closest[ties++] = y;
        }
        const std::size_t chosen =
            ties == 1 ? closest[0] : closest[rng.below(static_cast<std::uint64_t>(ties))];
        ++counts[lattice.hamming(x, chosen)];
    }
    return normalize(counts);
}

std::vector<std::int64_t> same_state_clusters(const Lattice& lattice) {
    const std::size_t n = lattice.node_count();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    for (std::size_t x = 0; x < n; ++x) {
        const auto nb = neighbor_slots(x, lattice.side());
        for (std::size_t y : {nb[1], nb[3]}) {
            if (lattice.hamming(x, y) == 0) {
                const std::size_t rx = find(x);
                const std::size_t ry = find(y);
                if (rx != ry) parent[rx] = ry;
            }
        }
    }
    std::vector<std::int64_t> size(n, 0);
    for (std::size_t x = 0; x < n; ++x) ++size[find(x)];
    std::vector<std::int64_t> sizes;
    for (std::int64_t s : size) {
        if (s > 0) sizes.push_back(s);
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

}  // namespace spinlang
