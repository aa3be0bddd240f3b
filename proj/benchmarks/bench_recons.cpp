#include "probdepth/recons.hpp"
#include "probdepth/rng.hpp"

#include <benchmark/benchmark.h>

using namespace probdepth;

namespace {

struct Setup {
    ImageBuffer target, source;
    EtaMap eta;
    CameraIntrinsics k;
    RigidPose pose;
    SampleSet set;
};

Setup make_setup(int w, int h, int n) {
    Rng rng(3);
    Setup s{ImageBuffer(w, h, 1), ImageBuffer(w, h, 1), EtaMap(w, h, 10.0, 0.1),
            CameraIntrinsics{w / 2.0, w / 2.0, (w - 1) / 2.0, (h - 1) / 2.0},
            RigidPose::translate(-0.3, 0, 0), make_sample_set(n, Family::gaussian)};
    for (double& v : s.target.data) v = rng.uniform();
    for (double& v : s.source.data) v = rng.uniform();
    for (std::size_t i = 0; i < s.eta.size(); ++i) s.eta.mu[i] = rng.uniform(8.0, 12.0);
    return s;
}

void BM_ReconsLoss(benchmark::State& state) {
    const Setup s = make_setup(64, 64, static_cast<int>(state.range(0)));
    const PhotometricConfig cfg{ErrorMode::l1};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            recons_loss(s.eta, s.target, s.source, s.k, s.pose, s.set, cfg));
}

void BM_ReconsLossGradL1(benchmark::State& state) {
    const Setup s = make_setup(64, 64, static_cast<int>(state.range(0)));
    const PhotometricConfig cfg{ErrorMode::l1};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            recons_loss_with_grad(s.eta, s.target, s.source, s.k, s.pose, s.set, cfg));
}

void BM_ReconsLossGradSsim(benchmark::State& state) {
    const Setup s = make_setup(64, 64, static_cast<int>(state.range(0)));
    const PhotometricConfig cfg{ErrorMode::ssim_l1};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            recons_loss_with_grad(s.eta, s.target, s.source, s.k, s.pose, s.set, cfg));
}

} // namespace

BENCHMARK(BM_ReconsLoss)->Arg(5)->Arg(9)->Arg(13);
BENCHMARK(BM_ReconsLossGradL1)->Arg(9);
BENCHMARK(BM_ReconsLossGradSsim)->Arg(9);
