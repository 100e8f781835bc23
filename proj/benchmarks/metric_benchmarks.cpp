#include <random>

#include <benchmark/benchmark.h>

#include "cgvm/brisque.hpp"
#include "cgvm/fr_metrics.hpp"
#include "cgvm/image.hpp"

using namespace cgvm;

namespace {

ImagePlane make_plane(int side, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 255.0);
    ImagePlane p;
    p.width = side;
    p.height = side;
    p.samples.resize(size_t(side) * side);
    for (double& s : p.samples) s = dist(rng);
    return p;
}

const ImagePlane& ref_plane() {
    static const ImagePlane p = make_plane(512, 1);
    return p;
}

const ImagePlane& gen_plane() {
    static const ImagePlane p = make_plane(512, 2);
    return p;
}

}  // namespace

static void BM_Mse512(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(mse(ref_plane(), gen_plane()));
    }
}
BENCHMARK(BM_Mse512);

static void BM_SsimWindowed512(benchmark::State& state) {
    SsimParams p;
    p.window = SsimWindow::Gaussian11x11Sigma1_5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(ref_plane(), gen_plane(), p).ssim);
    }
}
BENCHMARK(BM_SsimWindowed512);

static void BM_SsimGlobal512(benchmark::State& state) {
    SsimParams p;
    p.window = SsimWindow::Global;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(ref_plane(), gen_plane(), p).ssim);
    }
}
BENCHMARK(BM_SsimGlobal512);

static void BM_UqiWindowed512(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(uqi(ref_plane(), gen_plane(), UqiMode::Windowed8x8));
    }
}
BENCHMARK(BM_UqiWindowed512);

static void BM_BrisqueFeatures512(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(brisque_features(ref_plane()));
    }
}
BENCHMARK(BM_BrisqueFeatures512);

static void BM_Resize512To128(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(resize_bilinear(ref_plane(), 128, 128));
    }
}
BENCHMARK(BM_Resize512To128);

BENCHMARK_MAIN();
