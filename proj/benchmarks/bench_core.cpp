#include <benchmark/benchmark.h>

#include <vector>

#include "tailrisk/aggregation.hpp"
#include "tailrisk/coupling.hpp"
#include "tailrisk/dependence.hpp"
#include "tailrisk/rng.hpp"

namespace {

void BM_BinomialVar(benchmark::State& state) {
    const long long n = state.range(0);
    const double p = 0.009 / 0.999;
    for (auto _ : state)
        benchmark::DoNotOptimize(tailrisk::binomial_var(n, p, 0.999));
    state.SetComplexityN(n);
}
BENCHMARK(BM_BinomialVar)->Range(1000, 1000000)->Complexity();

void BM_CopulaValue(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::vector<double> u(dim);
    for (int i = 0; i < dim; ++i) u[i] = 0.1 + 0.8 * i / dim;
    for (auto _ : state)
        benchmark::DoNotOptimize(tailrisk::copula_value(0.999, u));
}
BENCHMARK(BM_CopulaValue)->Arg(2)->Arg(10)->Arg(100);

void BM_SampleRows(benchmark::State& state) {
    const std::int64_t rows = state.range(0);
    std::vector<tailrisk::MarginalDist> marginals(10, tailrisk::MarginalDist::bernoulli(0.01));
    tailrisk::GammaCoupling coupling(0.999, marginals);
    for (auto _ : state)
        benchmark::DoNotOptimize(tailrisk::sample(coupling, rows, 42));
    state.SetItemsProcessed(state.iterations() * rows);
}
BENCHMARK(BM_SampleRows)->Arg(1000)->Arg(100000);

void BM_KendallTau(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        pairs[static_cast<std::size_t>(i)] = {
            tailrisk::rng::uniform01(7, static_cast<std::uint64_t>(i), 1),
            tailrisk::rng::uniform01(7, static_cast<std::uint64_t>(i), 2)};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            tailrisk::estimate_dependence(tailrisk::Measure::kendall, pairs));
    state.SetComplexityN(n);
}
BENCHMARK(BM_KendallTau)->Range(1000, 1000000)->Complexity(benchmark::oNLogN);

} // namespace

BENCHMARK_MAIN();
