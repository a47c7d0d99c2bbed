#include <benchmark/benchmark.h>

#include <random>

#include "moments/curve_psi.hpp"
#include "moments/fixtures.hpp"
#include "moments/quadratic.hpp"
#include "moments/quartic.hpp"
#include "moments/sturm_zhang.hpp"
#include "moments/symlin.hpp"

using namespace moments;

namespace {

const ToleranceConfig kCfg;

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0, 1);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

AtomicMeasure random_measure(std::mt19937_64& rng, int n, int atoms) {
    std::normal_distribution<double> g(0, 1);
    AtomicMeasure mu;
    for (int i = 0; i < atoms; ++i) {
        Vector x(static_cast<std::size_t>(n));
        for (auto& c : x) c = g(rng);
        mu.add(std::move(x), 1.0 + 0.1 * i);
    }
    return mu;
}

void BM_SymEigen(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const Matrix a = random_symmetric(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(a));
}
BENCHMARK(BM_SymEigen)->Arg(6)->Arg(15)->Arg(45);

void BM_SturmZhang(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix g = random_symmetric(rng, n);
    const Matrix x = g * g.transpose();
    const Matrix q = random_symmetric(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(sz_decompose(x, q, kCfg));
}
BENCHMARK(BM_SturmZhang)->Arg(4)->Arg(9);

void BM_SolveUnconstrained(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const int n = static_cast<int>(state.range(0));
    const auto y = moments_of_measure(random_measure(rng, n, n + 2), n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_unconstrained(y, kCfg));
}
BENCHMARK(BM_SolveUnconstrained)->Arg(2)->Arg(8);

void BM_PsiExact(benchmark::State& state) {
    const auto m = load_fixture("ex2_5_variant").curve.value();
    for (auto _ : state) benchmark::DoNotOptimize(psi_exact(m));
}
BENCHMARK(BM_PsiExact);

void BM_PsiFloat(benchmark::State& state) {
    const auto m = load_fixture("ex2_5_variant").curve.value();
    for (auto _ : state) benchmark::DoNotOptimize(psi(m, kCfg));
}
BENCHMARK(BM_PsiFloat);

void BM_DecideQuartic(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto y = moments_of_measure(random_measure(rng, 2, static_cast<int>(state.range(0))), 2, 4);
    for (auto _ : state) benchmark::DoNotOptimize(decide_quartic(y, kCfg));
}
BENCHMARK(BM_DecideQuartic)->Arg(3)->Arg(6);

void BM_FlatSearch(benchmark::State& state) {
    std::mt19937_64 rng(5);
    const auto y = moments_of_measure(random_measure(rng, 2, 6), 2, 4);
    const auto m2 = moment_matrix(y, 2);
    for (auto _ : state) benchmark::DoNotOptimize(flat_search(m2, kCfg, FlatSearchOptions{}));
}
BENCHMARK(BM_FlatSearch);

}  // namespace

BENCHMARK_MAIN();
