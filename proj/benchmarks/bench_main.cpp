#include <benchmark/benchmark.h>

#include "branchcrit/criterion.hpp"
#include "branchcrit/lowering.hpp"
#include "branchcrit/modoracle.hpp"

using namespace branchcrit;

namespace {

// λ = (2r, 2r-1, ..., 1, 0) scaled down to the rank n.
Weight staircase(int n, long long step) {
    Weight w(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) w[static_cast<std::size_t>(t)] = step * (n - 1 - t);
    return w;
}

void BM_DecideFast(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BranchingInstance inst{staircase(n, 3), 7, 1, 5};
    for (auto _ : st) benchmark::DoNotOptimize(decide_fast(inst).decision);
}
BENCHMARK(BM_DecideFast)->DenseRange(2, 8, 2);

void BM_DecideDirect(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BranchingInstance inst{staircase(n, 3), 7, 1, 5};
    for (auto _ : st) benchmark::DoNotOptimize(decide_direct(inst).decision);
}
BENCHMARK(BM_DecideDirect)->DenseRange(2, 8, 2);

// T_eval and build_T_formal memoize per thread: one iteration each, so the figure is the
// cold cost when run alone (--benchmark_filter) and a lookup otherwise.
void BM_TEval(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const int d = static_cast<int>(st.range(1));
    std::set<int> M;
    for (int t = 2; t < n; ++t) M.insert(t);
    for (auto _ : st) benchmark::DoNotOptimize(T_eval(1, n, d, M, Multiset{}));
}
BENCHMARK(BM_TEval)->Args({3, 2})->Args({4, 2})->Args({5, 2})->Args({5, 3})->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_BuildTFormal(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    FormalCtx ctx{1, n, 2};
    std::set<int> M;
    for (int t = 2; t < n; ++t) M.insert(t);
    for (auto _ : st) benchmark::DoNotOptimize(build_T_formal(ctx, 1, n, M, Multiset{}, ctx.J0()));
}
BENCHMARK(BM_BuildTFormal)->DenseRange(3, 5)->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    BranchingInstance inst{staircase(n, 2), 3, 1, 2};
    for (auto _ : st) benchmark::DoNotOptimize(oracle(inst).exists);
}
BENCHMARK(BM_Oracle)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_GramRankModP(benchmark::State& st) {
    Weight lambda{4, 3, 1, 0};
    WeightBasis b = WeightBasis::make(lambda, {2, 2, 2});
    for (auto _ : st) benchmark::DoNotOptimize(rank_mod_p(reduce_mod(gram(b), 3), 3));
    st.counters["basis"] = static_cast<double>(b.size());
}
BENCHMARK(BM_GramRankModP)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
