#include "commfact/ergodic.hpp"
#include "commfact/io.hpp"
#include "commfact/nilfact.hpp"
#include "commfact/normalfact.hpp"
#include "commfact/shoda.hpp"
#include "commfact/steinitz.hpp"
#include "commfact/tucci.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace commfact;

namespace {

std::vector<cplx> zero_sum_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> v(n);
    cplx mean = 0.0;
    for (cplx& x : v) mean += (x = cplx(g(rng), g(rng)));
    for (cplx& x : v) x -= mean / static_cast<double>(n);
    return v;
}

void BM_FactorNormal(benchmark::State& state) {
    const Matrix a = random_normal_traceless(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(factor_normal(a));
}
BENCHMARK(BM_FactorNormal)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_StrictTriangular(benchmark::State& state) {
    const Matrix a = random_strict_upper(state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(strict_triangular_factor(a));
}
BENCHMARK(BM_StrictTriangular)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_FactorNilpotent(benchmark::State& state) {
    const Matrix a = random_nilpotent(state.range(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(factor_nilpotent(a));
}
BENCHMARK(BM_FactorNilpotent)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_FlagDecomposition(benchmark::State& state) {
    const Matrix a = random_nilpotent(state.range(0), 4);
    for (auto _ : state) benchmark::DoNotOptimize(flag_decomposition(a));
}
BENCHMARK(BM_FlagDecomposition)->RangeMultiplier(2)->Range(8, 32)->Unit(benchmark::kMillisecond);

void BM_FactorTraceless(benchmark::State& state) {
    const Matrix a = random_traceless(state.range(0), 5);
    for (auto _ : state) benchmark::DoNotOptimize(factor_traceless(a));
}
BENCHMARK(BM_FactorTraceless)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveOrder(benchmark::State& state) {
    const auto v = zero_sum_values(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(exhaustive_best_order(v));
}
BENCHMARK(BM_ExhaustiveOrder)->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);

void BM_GreedyOrder(benchmark::State& state) {
    const auto v = zero_sum_values(static_cast<std::size_t>(state.range(0)), 7);
    GreedyOptions opts;
    opts.exhaustive_cap = 0;
    for (auto _ : state) benchmark::DoNotOptimize(greedy_order(v, opts));
}
BENCHMARK(BM_GreedyOrder)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMicrosecond);

void BM_TucciApply(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const tucci::TucciConfig cfg = tucci::TucciConfig::sqrt_split(1.5, depth);
    const tucci::TensorOperator c = tucci::build_A(cfg.c);
    const Vector x = Vector::Ones(Index{1} << depth);
    for (auto _ : state) benchmark::DoNotOptimize(c.apply(x));
    state.SetItemsProcessed(state.iterations() * (int64_t{1} << depth));
}
BENCHMARK(BM_TucciApply)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_TucciToSparse(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const tucci::TensorOperator a = tucci::build_A(tucci::TucciConfig::sqrt_split(3.0, depth).a);
    for (auto _ : state) benchmark::DoNotOptimize(a.to_sparse());
}
BENCHMARK(BM_TucciToSparse)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);

void BM_ErgodicMultiTerm(benchmark::State& state) {
    const long long n = state.range(0);
    const ergodic::CyclicSystem sys(n, 1);
    std::map<long long, ergodic::Function> fs;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (long long k : {-1LL, 1LL, 2LL, 3LL}) {
        ergodic::Function f(static_cast<std::size_t>(n));
        for (cplx& x : f) x = cplx(g(rng), g(rng));
        fs[k] = f;
    }
    for (auto _ : state) benchmark::DoNotOptimize(ergodic::multi_term_factor(fs, sys));
}
BENCHMARK(BM_ErgodicMultiTerm)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

void BM_MatrixRoundTrip(benchmark::State& state) {
    const Matrix m = random_traceless(state.range(0), 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(io::parse_matrix(io::serialize_matrix(m, io::MatrixFormat::Json), io::MatrixFormat::Json));
}
BENCHMARK(BM_MatrixRoundTrip)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
