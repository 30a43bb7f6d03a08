#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "spinlang/dynamics.hpp"
#include "spinlang/observables.hpp"
#include "spinlang/oracle.hpp"

using namespace spinlang;

namespace {

Lattice checkerboard(int side) {
    Lattice lattice(side, 1);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            if ((r + c) % 2 == 1) lattice.flip(lattice.flat(NodeIndex{r, c}), 0);
        }
    }
    return lattice;
}

int differing_spins(const Lattice& a, const Lattice& b) {
    int d = 0;
    for (std::size_t n = 0; n < a.node_count(); ++n) d += hamming(a.state(n), b.state(n));
    return d;
}

}  // namespace

TEST(Temperature, RejectsNegativeAndNaN) {
    EXPECT_THROW(Temperature(-0.1), std::invalid_argument);
    EXPECT_THROW(Temperature(std::nan("")), std::invalid_argument);
    EXPECT_NO_THROW(Temperature(0.0));
    EXPECT_NO_THROW(Temperature(std::numeric_limits<double>::infinity()));
}

TEST(Metropolis, AcceptanceRule) {
    const Metropolis warm(Temperature(0.5));
    EXPECT_EQ(warm.acceptance(-2.0), 1.0);
    EXPECT_EQ(warm.acceptance(0.0), 1.0);
    EXPECT_DOUBLE_EQ(warm.acceptance(1.0), std::exp(-2.0));
    EXPECT_DOUBLE_EQ(warm.acceptance(2.0), std::exp(-4.0));
    const Metropolis cold(Temperature(0.0));
    EXPECT_EQ(cold.acceptance(0.0), 1.0);
    EXPECT_EQ(cold.acceptance(1.0), 0.0);
    EXPECT_EQ(cold.acceptance(2.0), 0.0);
    const Metropolis hot(Temperature(std::numeric_limits<double>::infinity()));
    EXPECT_EQ(hot.acceptance(2.0), 1.0);
}

TEST(ModelKind, ParseAndPrint) {
    EXPECT_EQ(parse_model("ordinary"), ModelKind::ordinary);
    EXPECT_EQ(parse_model("preference"), ModelKind::preference);
    EXPECT_EQ(to_string(ModelKind::preference), "preference");
    EXPECT_THROW(parse_model("potts"), std::invalid_argument);
}

TEST(OrdinaryStep, UniformLatticeGivesPlusTwoAndBoltzmannAcceptance) {
    const double t = 0.8;
    const Lattice up(6, 3);
    Rng rng(RngSeed{1});
    int accepted = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        Lattice lattice = up;
        const StepOutcome out = ordinary_step(lattice, Temperature(t), rng);
        EXPECT_EQ(out.dE, 2.0);
        EXPECT_FALSE(out.chosen_neighbor.has_value());
        accepted += out.accepted ? 1 : 0;
    }
    const double p = std::exp(-2.0 / t);
    EXPECT_NEAR(accepted / double(n), p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(OrdinaryStep, AntiAlignedSpinAlwaysFlips) {
    Rng rng(RngSeed{2});
    for (int i = 0; i < 200; ++i) {
        Lattice lattice = checkerboard(4);
        const StepOutcome out = ordinary_step(lattice, Temperature(0.0), rng);
        EXPECT_EQ(out.dE, -2.0);
        EXPECT_TRUE(out.accepted);
    }
}

TEST(OrdinaryStep, InfiniteTemperatureAcceptsEverything) {
    Lattice lattice(5, 2);
    Rng rng(RngSeed{3});
    const Temperature hot(std::numeric_limits<double>::infinity());
    for (int i = 0; i < 1000; ++i) EXPECT_TRUE(ordinary_step(lattice, hot, rng).accepted);
}

TEST(Steps, RandomDrawOrderIsRowColumnComponentThenAcceptance) {
    const Lattice start(7, 3);
    Lattice lattice = start;
    Rng rng(RngSeed{77});
    Rng mirror(RngSeed{77});
    const StepOutcome out = ordinary_step(lattice, Temperature(1.0), rng);
    const auto row = static_cast<int>(mirror.below(7));
    const auto col = static_cast<int>(mirror.below(7));
    const auto k = static_cast<int>(mirror.below(3));
    const bool accept = mirror.uniform() < std::exp(-2.0);
    EXPECT_EQ(out.node, (NodeIndex{row, col}));
    EXPECT_EQ(out.component, k);
    EXPECT_EQ(out.accepted, accept);
    EXPECT_EQ(rng.next(), mirror.next());
}

TEST(Steps, PreferenceTieDrawPrecedesAcceptance) {
    // Uniform lattice: all four neighbours tie at distance 0.
    Lattice lattice(5, 2);
    Rng rng(RngSeed{5});
    Rng mirror(RngSeed{5});
    const StepOutcome out = preference_step(lattice, Temperature(2.0), rng);
    const auto row = static_cast<int>(mirror.below(5));
    const auto col = static_cast<int>(mirror.below(5));
    const auto k = static_cast<int>(mirror.below(2));
    const auto pick = mirror.below(4);
    const bool accept = mirror.uniform() < std::exp(-1.0);
    EXPECT_EQ(out.node, (NodeIndex{row, col}));
    EXPECT_EQ(out.component, k);
    ASSERT_TRUE(out.chosen_neighbor.has_value());
    EXPECT_EQ(*out.chosen_neighbor, neighbors(NodeIndex{row, col}, 5)[pick]);
    EXPECT_EQ(out.accepted, accept);
    EXPECT_EQ(rng.next(), mirror.next());
}

TEST(Steps, AtMostOneSpinChangesAndOutcomeDescribesIt) {
    Rng rng(RngSeed{8});
    for (ModelKind model : {ModelKind::ordinary, ModelKind::preference}) {
        Lattice lattice = init_lattice(6, 4, InitMode::random, RngSeed{9});
        const Metropolis rule(Temperature(0.7));
        std::set<double> seen;
        for (int i = 0; i < 5000; ++i) {
            const Lattice before = lattice;
            const StepOutcome out = model == ModelKind::ordinary ? ordinary_step(lattice, rule, rng)
                                                                 : preference_step(lattice, rule, rng);
            seen.insert(out.dE);
            const int diff = differing_spins(before, lattice);
            EXPECT_EQ(diff, out.accepted ? 1 : 0);
            if (out.accepted) {
                EXPECT_EQ(lattice.spin(out.node, out.component), -before.spin(out.node, out.component));
            }
            if (out.dE <= 0) {
                EXPECT_TRUE(out.accepted);
            }
        }
        const std::set<double> allowed = model == ModelKind::ordinary
                                             ? std::set<double>{-2, -1, 0, 1, 2}
                                             : std::set<double>{-2, 2};
        for (double d : seen) EXPECT_TRUE(allowed.count(d)) << d;
    }
}

TEST(PreferenceStep, ChosenNeighbourIsClosestAndSetsDeltaE) {
    Rng rng(RngSeed{10});
    Lattice lattice = init_lattice(8, 6, InitMode::random, RngSeed{11});
    const Metropolis rule(Temperature(0.4));
    for (int i = 0; i < 5000; ++i) {
        const Lattice before = lattice;
        const StepOutcome out = preference_step(lattice, rule, rng);
        ASSERT_TRUE(out.chosen_neighbor.has_value());
        const auto nb = neighbors(out.node, 8);
        int best = 100;
        for (const NodeIndex& y : nb) best = std::min(best, hamming(before.state(out.node), before.state(y)));
        EXPECT_NE(std::find(nb.begin(), nb.end(), *out.chosen_neighbor), nb.end());
        EXPECT_EQ(hamming(before.state(out.node), before.state(*out.chosen_neighbor)), best);
        EXPECT_EQ(out.dE, 2.0 * before.spin(out.node, out.component) *
                              before.spin(*out.chosen_neighbor, out.component));
    }
}

TEST(PreferenceStep, UniqueAlignedNeighbourGivesPlusTwo) {
    // Node (1,1) is all +1; only its right neighbour is all +1, the rest are far.
    Lattice lattice(3, 5);
    for (std::size_t n = 0; n < lattice.node_count(); ++n) lattice.set_state(n, SpinState::uniform(5, -1));
    lattice.set_state(NodeIndex{1, 1}, SpinState::uniform(5, 1));
    lattice.set_state(NodeIndex{1, 2}, SpinState::uniform(5, 1));
    Rng rng(RngSeed{12});
    int hits = 0;
    for (int i = 0; i < 3000; ++i) {
        Lattice copy = lattice;
        const StepOutcome out = preference_step(copy, Temperature(1.0), rng);
        if (!(out.node == NodeIndex{1, 1})) continue;
        ++hits;
        EXPECT_EQ(*out.chosen_neighbor, (NodeIndex{1, 2}));
        EXPECT_EQ(out.dE, 2.0);
    }
    EXPECT_GT(hits, 200);
}

TEST(PreferenceStep, OpposedClosestComponentAlwaysFlips) {
    // Every neighbour of every node is the complement in one component only.
    Lattice lattice = checkerboard(4);
    Rng rng(RngSeed{13});
    for (int i = 0; i < 200; ++i) {
        Lattice copy = lattice;
        const StepOutcome out = preference_step(copy, Temperature(0.0), rng);
        EXPECT_EQ(out.dE, -2.0);
        EXPECT_TRUE(out.accepted);
    }
}

TEST(PreferenceStep, TiesSplitEvenlyBetweenEquallyCloseNeighbours) {
    // L = 1, node (1,1) = +1 with up/down agreeing (+1) and left/right opposed (-1).
    Lattice lattice(3, 1);
    lattice.set_spin(lattice.flat(NodeIndex{1, 0}), 0, -1);
    lattice.set_spin(lattice.flat(NodeIndex{1, 2}), 0, -1);
    Rng rng(RngSeed{14});
    std::map<int, int> picks;
    int hits = 0;
    for (int i = 0; i < 90000; ++i) {
        Lattice copy = lattice;
        const StepOutcome out = preference_step(copy, Temperature(1.0), rng);
        if (!(out.node == NodeIndex{1, 1})) continue;
        ++hits;
        EXPECT_EQ(out.dE, 2.0);
        ++picks[out.chosen_neighbor->row * 3 + out.chosen_neighbor->col];
    }
    EXPECT_EQ(picks.size(), 2U);
    const double up = picks[0 * 3 + 1] / double(hits);
    EXPECT_NEAR(up, 0.5, 5 * std::sqrt(0.25 / hits));
    EXPECT_EQ(picks[0 * 3 + 1] + picks[2 * 3 + 1], hits);
}

TEST(PreferenceStep, EmpiricalTransitionRowMatchesChainOracle) {
    // From one fixed M=3, L=1 configuration, single-step frequencies must match
    // the enumerated preference kernel row.
    const Temperature t(0.9);
    const auto chain = oracle::build_preference_chain(3, 1, t);
    const std::uint64_t from = 0b101100110;
    const Lattice start = oracle::decode(from, 3, 1);
    Rng rng(RngSeed{15});
    std::map<std::uint64_t, int> counts;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        Lattice l = start;
        preference_step(l, t, rng);
        ++counts[oracle::encode(l)];
    }
    double total = 0.0;
    for (std::uint64_t to = 0; to < chain.size(); ++to) {
        const double p = chain(from, to);
        total += p;
        const double freq = counts[to] / double(n);
        EXPECT_NEAR(freq, p, 5 * std::sqrt(p * (1 - p) / n) + 1e-12) << "to=" << to;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Run, ZeroSweepsLeavesLatticeUnchanged) {
    Lattice lattice = init_lattice(6, 3, InitMode::random, RngSeed{16});
    const Lattice before = lattice;
    Rng rng(RngSeed{17});
    run(lattice, ModelKind::preference, Temperature(1.0), 0, rng);
    EXPECT_EQ(lattice, before);
    EXPECT_THROW(run(lattice, ModelKind::ordinary, Temperature(1.0), -1, rng), std::invalid_argument);
}

TEST(Run, ZeroTemperatureUniformStateIsAbsorbing) {
    for (ModelKind model : {ModelKind::ordinary, ModelKind::preference}) {
        Lattice lattice = init_lattice(10, 3, InitMode::uniform_up, RngSeed{0});
        Rng rng(RngSeed{18});
        run(lattice, model, Temperature(0.0), 100, rng);
        EXPECT_EQ(lattice, Lattice(10, 3));
    }
}

TEST(Run, FixedSeedIsBitReproducible) {
    for (ModelKind model : {ModelKind::ordinary, ModelKind::preference}) {
        Lattice a = init_lattice(12, 5, InitMode::random, RngSeed{19});
        Lattice b = a;
        Rng ra(RngSeed{20});
        Rng rb(RngSeed{20});
        run(a, model, Temperature(0.6), 10, ra);
        run(b, model, Temperature(0.6), 10, rb);
        EXPECT_EQ(a, b);
    }
}

TEST(Run, HookSeesEverySweepAndHooklessRunMatches) {
    Lattice a = init_lattice(8, 2, InitMode::random, RngSeed{21});
    Lattice b = a;
    Rng ra(RngSeed{22});
    Rng rb(RngSeed{22});
    std::vector<std::int64_t> seen;
    run(a, ModelKind::preference, Temperature(0.5), 7, ra,
        [&](const Lattice&, std::int64_t s) { seen.push_back(s); });
    run(b, ModelKind::preference, Temperature(0.5), 7, rb);
    EXPECT_EQ(seen, (std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(a, b);
    EXPECT_EQ(attempts_per_sweep(a), 8 * 8 * 2);
}

TEST(Run, OrdinaryComponentsBehaveLikeSingleComponentRuns) {
    // L = 4 ordinary at T = 0.8 (disordered, fast mixing) vs. four L = 1 runs.
    const Temperature t(0.8);
    const int sweeps = 600;
    const int burn = 100;
    auto component_means = [&](int l, std::uint64_t seed) {
        Lattice lattice = init_lattice(16, l, InitMode::random, RngSeed{seed});
        Rng rng(RngSeed{seed + 1});
        std::vector<double> sum(l, 0.0);
        run(lattice, ModelKind::ordinary, t, sweeps, rng, [&](const Lattice& x, std::int64_t s) {
            if (s <= burn) return;
            for (int k = 0; k < l; ++k) sum[k] += component_energy(x, k);
        });
        for (double& v : sum) v /= sweeps - burn;
        return sum;
    };
    const auto multi = component_means(4, 100);
    double reference = 0.0;
    for (std::uint64_t s = 0; s < 4; ++s) reference += component_means(1, 200 + 2 * s)[0] / 4.0;
    for (double e : multi) EXPECT_NEAR(e, reference, 0.03);
}
