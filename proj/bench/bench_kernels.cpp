// Serial reference kernels against the chunked OpenMP kernels.
// Thread count follows OMP_NUM_THREADS / ALDAR_THREADS.
#include <map>

#include <benchmark/benchmark.h>

#include "aldar/experiments.hpp"
#include "aldar/likelihood.hpp"

using namespace aldar;

namespace {

struct Fixture {
    Regressors reg;
    Vec theta;
};

const Fixture& fixture(std::int64_t n) {
    static std::map<std::int64_t, Fixture> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        const ModelParams m = table2_dgp();
        const SeriesSample y = simulate(m, make_innovation(Normal{}), static_cast<std::size_t>(n), 500, 7);
        it = cache.emplace(n, Fixture{build_regressors(y, m.order()), m.flatten()}).first;
    }
    return it->second;
}

void BM_loglik_serial(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(serial::loglik(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_loglik_chunked(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(loglik(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_score_serial(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(serial::score(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_score_chunked(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(score(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_hessian_serial(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(serial::hessian(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_hessian_chunked(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(hessian(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
void BM_derivatives_fused(benchmark::State& st) {
    const Fixture& f = fixture(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(loglik_derivatives(f.theta, f.reg));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

#define ALDAR_SIZES RangeMultiplier(10)->Range(10000, 1000000)->Unit(benchmark::kMicrosecond)
BENCHMARK(BM_loglik_serial)->ALDAR_SIZES;
BENCHMARK(BM_loglik_chunked)->ALDAR_SIZES;
BENCHMARK(BM_score_serial)->ALDAR_SIZES;
BENCHMARK(BM_score_chunked)->ALDAR_SIZES;
BENCHMARK(BM_hessian_serial)->ALDAR_SIZES;
BENCHMARK(BM_hessian_chunked)->ALDAR_SIZES;
BENCHMARK(BM_derivatives_fused)->ALDAR_SIZES;

int main(int argc, char** argv) {
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
