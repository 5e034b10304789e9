#include <benchmark/benchmark.h>

#include "primelab/exactdist.hpp"
#include "primelab/generators.hpp"
#include "primelab/ntheory.hpp"
#include "primelab/rng.hpp"

using namespace primelab;

namespace {

void BM_Sieve(benchmark::State& state) {
    const auto bound = static_cast<Nat>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sieve(bound).prime_count_upto(bound));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sieve)->RangeMultiplier(10)->Range(10'000, 10'000'000)->Unit(benchmark::kMillisecond);

void BM_MillerRabin(benchmark::State& state) {
    Nat n = (Nat{1} << state.range(0)) + 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_prime_deterministic(n));
        n += 2;
    }
}
BENCHMARK(BM_MillerRabin)->Arg(20)->Arg(40)->Arg(62);

void BM_UniformBelow(benchmark::State& state) {
    CountingBitSource src(1);
    const auto m = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(src.uniform_below(m));
    }
    state.counters["bits/draw"] =
        benchmark::Counter(static_cast<double>(src.bits_consumed()) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_UniformBelow)->Arg(30)->Arg(433)->Arg(1'000'000);

void BM_UnitSampler(benchmark::State& state) {
    const Modulus q = make_modulus(30030);
    const auto method = static_cast<UnitMethod>(state.range(0));
    CountingBitSource src(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_unit(src, q, method));
    }
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_UnitSampler)
    ->Arg(static_cast<int>(UnitMethod::Rejection))
    ->Arg(static_cast<int>(UnitMethod::JoyePaillier));

void BM_Generator(benchmark::State& state) {
    GenConfig c;
    c.algorithm = static_cast<Algorithm>(state.range(0));
    c.x = 1'000'000;
    c.seed = 3;
    if (uses_fixed_modulus(c.algorithm)) {
        c.epsilon = 0.3;
    }
    if (uses_random_modulus(c.algorithm)) {
        c.A = 2.0;
    }
    const PrimeGenerator gen(c);
    std::uint64_t trial = 0;
    std::uint64_t bits = 0;
    for (auto _ : state) {
        const GenResult r = gen.run_trial(trial++);
        bits += r.telemetry.bits_consumed;
        benchmark::DoNotOptimize(r.prime);
    }
    state.SetLabel(std::string(to_string(c.algorithm)));
    state.counters["bits/prime"] = benchmark::Counter(static_cast<double>(bits) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_Generator)->DenseRange(0, 4);

void BM_ExactBasic(benchmark::State& state) {
    const auto x = static_cast<Nat>(state.range(0));
    const auto table = sieve(x);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_dist_basic<double>(table, x, 2310).dist.space_size());
    }
}
BENCHMARK(BM_ExactBasic)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
