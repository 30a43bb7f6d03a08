#include <benchmark/benchmark.h>

#include "spinlang/dynamics.hpp"
#include "spinlang/lattice.hpp"
#include "spinlang/observables.hpp"
#include "spinlang/oracle.hpp"

using namespace spinlang;

namespace {

// state.range(0) = L; one iteration is one sweep of a 50x50 lattice.
void BM_Sweep(benchmark::State& state, ModelKind model, double temp) {
    const int l = static_cast<int>(state.range(0));
    Lattice lattice = init_lattice(50, l, InitMode::random, RngSeed{7});
    Rng rng(RngSeed{11});
    const Temperature t(temp);
    for (auto _ : state) {
        run(lattice, model, t, 1, rng);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * attempts_per_sweep(lattice));
}

void BM_Rng(benchmark::State& state) {
    Rng rng(RngSeed{3});
    std::uint64_t acc = 0;
    for (auto _ : state) acc += rng.below(50);
    benchmark::DoNotOptimize(acc);
}

void BM_EnergyPreference(benchmark::State& state) {
    const Lattice lattice = init_lattice(50, static_cast<int>(state.range(0)), InitMode::random, RngSeed{5});
    for (auto _ : state) benchmark::DoNotOptimize(energy_preference(lattice));
}

void BM_EdgeHistogram(benchmark::State& state) {
    const Lattice lattice = init_lattice(50, static_cast<int>(state.range(0)), InitMode::random, RngSeed{5});
    for (auto _ : state) benchmark::DoNotOptimize(edge_hamming_histogram(lattice));
}

void BM_PreferenceChainBuild(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(oracle::build_preference_chain(3, 1, Temperature(1.0)));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Sweep, ordinary_T03, ModelKind::ordinary, 0.3)->Arg(1)->Arg(5)->Arg(25);
BENCHMARK_CAPTURE(BM_Sweep, ordinary_T50, ModelKind::ordinary, 50.0)->Arg(5);
BENCHMARK_CAPTURE(BM_Sweep, preference_T03, ModelKind::preference, 0.3)->Arg(1)->Arg(5)->Arg(25);
BENCHMARK_CAPTURE(BM_Sweep, preference_T50, ModelKind::preference, 50.0)->Arg(5);
BENCHMARK(BM_Rng);
BENCHMARK(BM_EnergyPreference)->Arg(5)->Arg(25);
BENCHMARK(BM_EdgeHistogram)->Arg(5);
BENCHMARK(BM_PreferenceChainBuild);
BENCHMARK_MAIN();
