#include "probdepth/metrics.hpp"
#include "probdepth/rng.hpp"

#include <benchmark/benchmark.h>

using namespace probdepth;

namespace {

EvalFrame make_frame(int n) {
    Rng rng(9);
    EvalFrame f;
    f.d_star = DepthMap(n, 1);
    f.d_hat = DepthMap(n, 1);
    f.uncertainty.resize(n);
    f.mask = ValidMask(n, 1, 1);
    for (int i = 0; i < n; ++i) {
        f.d_star.data[i] = rng.uniform(2.0, 40.0);
        f.d_hat.data[i] = f.d_star.data[i] * rng.uniform(0.6, 1.5);
        f.uncertainty[i] = rng.uniform(0.0, 5.0);
    }
    return f;
}

void BM_Sparsification(benchmark::State& state) {
    const EvalFrame f = make_frame(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(sparsification(f, BaseMetric::abs_rel));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateFrame(benchmark::State& state) {
    const EvalFrame f = make_frame(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_frame(f));
}

} // namespace

BENCHMARK(BM_Sparsification)->Arg(1000)->Arg(10000)->Arg(100000);
BENCHMARK(BM_EvaluateFrame)->Arg(10000);
