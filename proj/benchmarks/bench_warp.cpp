#include "probdepth/rng.hpp"
#include "probdepth/warp.hpp"

#include <benchmark/benchmark.h>

using namespace probdepth;

namespace {

ImageBuffer make_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    ImageBuffer img(w, h, 1);
    for (double& v : img.data) v = rng.uniform();
    return img;
}

void BM_WarpImage(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0));
    const int h = w * 3 / 4;
    const ImageBuffer source = make_image(w, h, 1);
    DepthMap depth(w, h, 10.0);
    const CameraIntrinsics k{w / 2.0, w / 2.0, (w - 1) / 2.0, (h - 1) / 2.0};
    const RigidPose pose = RigidPose::translate(-0.3, 0, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp_image(source, depth, k, pose));
    }
    state.SetItemsProcessed(state.iterations() * w * h);
}

void BM_WarpWithJacobian(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0));
    const int h = w * 3 / 4;
    const ImageBuffer source = make_image(w, h, 1);
    DepthMap depth(w, h, 10.0);
    const CameraIntrinsics k{w / 2.0, w / 2.0, (w - 1) / 2.0, (h - 1) / 2.0};
    const RigidPose pose = RigidPose::translate(-0.3, 0, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp_image_with_jacobian(source, depth, k, pose));
    }
    state.SetItemsProcessed(state.iterations() * w * h);
}

} // namespace

BENCHMARK(BM_WarpImage)->Arg(64)->Arg(256)->Arg(640);
BENCHMARK(BM_WarpWithJacobian)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
