#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "spinlang/observables.hpp"

using namespace spinlang;

namespace {

Lattice checkerboard_states(int side, const SpinState& a, const SpinState& b) {
    Lattice lattice(side, static_cast<int>(a.size()));
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) lattice.set_state(NodeIndex{r, c}, (r + c) % 2 == 0 ? a : b);
    }
    return lattice;
}

Lattice one_flipped_3x3() {
    Lattice lattice(3, 1);
    lattice.flip(lattice.flat(NodeIndex{1, 1}), 0);
    return lattice;
}

// Brute-force E_a: enumerate the node state and n neighbour states.
double brute_force_ea(int l, int n) {
    const int bits = l * (n + 1);
    double sum = 0.0;
    for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << bits); ++cfg) {
        const std::uint64_t mask = (std::uint64_t{1} << l) - 1;
        const std::uint64_t x = cfg & mask;
        int best = -l;
        for (int j = 1; j <= n; ++j) {
            const std::uint64_t y = (cfg >> (j * l)) & mask;
            best = std::max(best, l - 2 * std::popcount(x ^ y));
        }
        sum += best;
    }
    return -sum / static_cast<double>(l) / std::ldexp(1.0, bits);
}

}  // namespace

TEST(Energy, UniformLatticeIsMinusOne) {
    for (int l : {1, 5, 25}) {
        const Lattice up(4, l);
        EXPECT_EQ(energy_ordinary(up), -1.0);
        EXPECT_EQ(energy_preference(up), -1.0);
    }
}

TEST(Energy, CheckerboardOrdinaryIsPlusOne) {
    EXPECT_EQ(energy_ordinary(checkerboard_states(6, SpinState{1}, SpinState{-1})), 1.0);
}

TEST(Energy, SingleFlippedNode) {
    const Lattice lattice = one_flipped_3x3();
    EXPECT_DOUBLE_EQ(energy_ordinary(lattice), -20.0 / 36.0);
    EXPECT_DOUBLE_EQ(energy_preference(lattice), -7.0 / 9.0);
}

TEST(Energy, RandomPreferenceEnergyNearAsymptote) {
    // 40,000 nodes; per-node sd of best-dot/L is ~0.28 with short-range correlation.
    const Lattice lattice = init_lattice(200, 5, InitMode::random, RngSeed{4});
    EXPECT_NEAR(energy_preference(lattice), -0.448, 0.01);
}

TEST(Energy, PreferenceNeverAboveOrdinaryAndOrdinaryDecomposes) {
    Rng rng(RngSeed{6});
    for (int trial = 0; trial < 50; ++trial) {
        const int side = 2 + static_cast<int>(rng.below(10));
        const int l = 1 + static_cast<int>(rng.below(12));
        const Lattice lattice = init_lattice(side, l, InitMode::random, RngSeed{rng.next()});
        EXPECT_LE(energy_preference(lattice), energy_ordinary(lattice) + 1e-15);
        double mean = 0.0;
        for (int k = 0; k < l; ++k) mean += component_energy(lattice, k) / l;
        EXPECT_NEAR(energy_ordinary(lattice), mean, 1e-12);
        EXPECT_GE(energy_ordinary(lattice), -1.0);
        EXPECT_LE(energy_ordinary(lattice), 1.0);
    }
}

TEST(CenteredEnergy, EndpointsAndArithmetic) {
    const double ea = -0.448;
    EXPECT_EQ(centered_energy(-1.0, ea), -1.0);
    EXPECT_EQ(centered_energy(ea, ea), 0.0);
    EXPECT_NEAR(centered_energy(-0.7, ea), -0.252 / 0.552, 1e-12);
    EXPECT_THROW(centered_energy(-0.5, -1.0), std::invalid_argument);
    EXPECT_THROW(centered_energy(-0.5, -1.5), std::invalid_argument);
}

TEST(CenteredEnergy, StrictlyIncreasing) {
    const auto ea = asymptotic_energy_analytic(5, 4);
    double prev = centered_energy(-1.0, ea);
    for (int i = 1; i <= 200; ++i) {
        const double c = centered_energy(-1.0 + i * 0.01, ea);
        EXPECT_GT(c, prev);
        prev = c;
    }
}

TEST(AsymptoticEnergy, AnalyticExactValues) {
    EXPECT_EQ(asymptotic_energy_analytic(1, 4).value, -0.875);
    // Exact rational: -117411 / 262144 (= -469644 / 2^20).
    EXPECT_EQ(asymptotic_energy_analytic(5, 4).value, -117411.0 / 262144.0);
    // Independent Python Fraction evaluation of the same CDF-power sum.
    EXPECT_NEAR(asymptotic_energy_analytic(25, 4).value, -0.20476092508008123, 1e-15);
    EXPECT_NEAR(asymptotic_energy_analytic(25, 4).value, -0.204, 0.005);
    EXPECT_EQ(asymptotic_energy_analytic(1, 1).value, 0.0);
    EXPECT_EQ(asymptotic_energy_analytic(7, 1).value, 0.0);
    EXPECT_THROW(asymptotic_energy_analytic(0, 4), std::invalid_argument);
    EXPECT_THROW(asymptotic_energy_analytic(5, 0), std::invalid_argument);
}

TEST(AsymptoticEnergy, AnalyticMatchesBruteForceEnumeration) {
    for (auto [l, n] : {std::pair{1, 4}, {2, 3}, {3, 4}, {4, 3}, {5, 2}, {2, 1}}) {
        EXPECT_NEAR(asymptotic_energy_analytic(l, n).value, brute_force_ea(l, n), 1e-14)
            << "L=" << l << " n=" << n;
    }
}

TEST(AsymptoticEnergy, AnalyticIsInRangeAndTendsToZeroWithL) {
    double prev = -1.0;
    for (int l = 1; l <= 64; ++l) {
        const double v = asymptotic_energy_analytic(l, 4).value;
        EXPECT_GE(v, -1.0);
        EXPECT_LT(v, 0.0);
        if (l % 2 == 1) {  // odd L avoids parity wobble
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(AsymptoticEnergy, SampledAgreesWithAnalytic) {
    for (int l : {1, 5, 25}) {
        const auto sampled = asymptotic_energy_sampled(l, 4, 1'000'000, RngSeed{static_cast<std::uint64_t>(l)});
        const auto exact = asymptotic_energy_analytic(l, 4);
        EXPECT_GT(sampled.std_error, 0.0);
        EXPECT_NEAR(sampled.value, exact.value, 3 * sampled.std_error) << "L=" << l;
    }
}

TEST(AsymptoticEnergy, SampledSingleNeighbourIsSymmetricAndDeterministic) {
    const auto a = asymptotic_energy_sampled(1, 1, 200'000, RngSeed{9});
    EXPECT_NEAR(a.value, 0.0, 4 * a.std_error);
    const auto b = asymptotic_energy_sampled(1, 1, 200'000, RngSeed{9});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_THROW(asymptotic_energy_sampled(5, 4, 0, RngSeed{1}), std::invalid_argument);
}

TEST(EdgeHistogram, UniformAndComplementaryCheckerboard) {
    const auto uniform = edge_hamming_histogram(Lattice(6, 5));
    EXPECT_EQ(uniform.probs, (std::vector<double>{1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(uniform.count, 2 * 36);
    const SpinState a{1, -1, 1, 1, -1};
    const SpinState b{-1, 1, -1, -1, 1};
    const auto board = edge_hamming_histogram(checkerboard_states(6, a, b));
    EXPECT_EQ(board.probs, (std::vector<double>{0, 0, 0, 0, 0, 1}));
}

TEST(EdgeHistogram, RandomLatticeIsBinomial) {
    const auto h = edge_hamming_histogram(init_lattice(200, 5, InitMode::random, RngSeed{10}));
    const double binom[] = {1, 5, 10, 10, 5, 1};
    double total = 0.0;
    for (int d = 0; d <= 5; ++d) {
        const double p = binom[d] / 32.0;
        total += h.probs[d];
        EXPECT_NEAR(h.probs[d], p, 5 * std::sqrt(p * (1 - p) / h.count)) << d;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PreferredHistogram, UniformLatticeAllAtZero) {
    const auto h = preferred_hamming_histogram(Lattice(5, 3), RngSeed{1});
    EXPECT_EQ(h.probs, (std::vector<double>{1, 0, 0, 0}));
    EXPECT_EQ(h.count, 25);
}

TEST(PreferredHistogram, RandomLatticeMeanMatchesAnalyticTransform) {
    // E[min Hamming over 4] = (L - E[max D]) / 2 with E[max D] = -L * E_a.
    const double e_max = -5.0 * asymptotic_energy_analytic(5, 4).value;
    const double expected = (5.0 - e_max) / 2.0;
    EXPECT_NEAR(expected, 1.380282, 1e-6);
    const Lattice lattice = init_lattice(200, 5, InitMode::random, RngSeed{11});
    const auto h = preferred_hamming_histogram(lattice, RngSeed{12});
    EXPECT_NEAR(h.mean(), expected, 0.02);
}

TEST(PreferredHistogram, StochasticallyBelowEdgeHistogram) {
    Rng rng(RngSeed{13});
    for (int trial = 0; trial < 20; ++trial) {
        const Lattice lattice = init_lattice(20, 6, InitMode::random, RngSeed{rng.next()});
        const auto pref = preferred_hamming_histogram(lattice, RngSeed{rng.next()});
        const auto edge = edge_hamming_histogram(lattice);
        double cp = 0.0;
        double ce = 0.0;
        for (std::size_t d = 0; d < pref.probs.size(); ++d) {
            cp += pref.probs[d];
            ce += edge.probs[d];
            EXPECT_GE(cp + 1e-12, ce);
        }
        EXPECT_NEAR(cp, 1.0, 1e-12);
    }
}

TEST(PreferredHistogram, DistanceIsTieInvariant) {
    const Lattice lattice = init_lattice(30, 3, InitMode::random, RngSeed{14});
    EXPECT_EQ(preferred_hamming_histogram(lattice, RngSeed{1}).probs,
              preferred_hamming_histogram(lattice, RngSeed{2}).probs);
}

TEST(Clusters, Examples) {
    EXPECT_EQ(same_state_clusters(Lattice(5, 3)), (std::vector<std::int64_t>{25}));
    EXPECT_EQ(same_state_clusters(checkerboard_states(6, SpinState{1}, SpinState{-1})),
              std::vector<std::int64_t>(36, 1));
    EXPECT_EQ(same_state_clusters(one_flipped_3x3()), (std::vector<std::int64_t>{1, 8}));
}

TEST(Clusters, WrapAroundJoinsOppositeEdges) {
    Lattice lattice(4, 1);
    for (int r = 0; r < 4; ++r) {
        lattice.flip(lattice.flat(NodeIndex{r, 1}), 0);
        lattice.flip(lattice.flat(NodeIndex{r, 2}), 0);
    }
    // Columns 3 and 0 are adjacent across the boundary.
    EXPECT_EQ(same_state_clusters(lattice), (std::vector<std::int64_t>{8, 8}));
}

TEST(Clusters, SizesSumToNodeCount) {
    Rng rng(RngSeed{15});
    for (int trial = 0; trial < 30; ++trial) {
        const int side = 2 + static_cast<int>(rng.below(20));
        const Lattice lattice = init_lattice(side, 1 + static_cast<int>(rng.below(3)), InitMode::random,
                                             RngSeed{rng.next()});
        const auto sizes = same_state_clusters(lattice);
        EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0}), side * side);
        EXPECT_TRUE(std::is_sorted(sizes.begin(), sizes.end()));
    }
}
