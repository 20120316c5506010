// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/inpaint.hpp"
#include "panolayers/rasterizer.hpp"
#include "panolayers/sampling.hpp"
#include "panolayers/ssim.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace {

using namespace panolayers;

std::vector<Splat>
random_splats(int count) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Splat> out;
    for (int i = 0; i < count; ++i) {
        Splat s;
        const double d  = 2.0 + 6.0 * u(rng);
        s.position      = {d, (u(rng) - 0.5) * d, (u(rng) - 0.5) * d};
        s.rotation      = Eigen::Vector4d(u(rng), u(rng), u(rng), u(rng)).normalized();
        s.log_scale     = Eigen::Vector3d::Constant(std::log(0.02 + 0.08 * u(rng)));
        s.opacity_logit = logit(0.2 + 0.6 * u(rng));
        s.color         = {u(rng), u(rng), u(rng)};
        out.push_back(s);
    }
    return out;
}

CameraView
view_of(int size) {
    CameraView v;
    v.intrinsics.width = v.intrinsics.height = size;
    return v;
}

Panorama
noise_pano(int w, int h) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Panorama p(w, h);
    for (auto &v : p.pixels()) {
        v = Rgb(u(rng), u(rng), u(rng));
    }
    return p;
}

void
BM_RasterizeForward(benchmark::State &state) {
    const auto splats = random_splats(static_cast<int>(state.range(0)));
    const auto view   = view_of(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize(splats, view));
    }
}
BENCHMARK(BM_RasterizeForward)->Args({1000, 128})->Args({5000, 128})->Args({5000, 512})->Unit(benchmark::kMillisecond);

void
BM_RasterizeBackward(benchmark::State &state) {
    const auto splats = random_splats(static_cast<int>(state.range(0)));
    const auto view   = view_of(static_cast<int>(state.range(1)));
    RasterContext ctx;
    rasterize(splats, view, {}, &ctx);
    const ColorImage grad(view.intrinsics.width, view.intrinsics.height, Rgbd::Constant(0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize_backward(splats, view, ctx, grad));
    }
}
BENCHMARK(BM_RasterizeBackward)->Args({1000, 128})->Args({5000, 128})->Unit(benchmark::kMillisecond);

void
BM_SamplePerspective(benchmark::State &state) {
    const auto pano = noise_pano(2048, 1024);
    const auto view = view_of(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_perspective(pano, view));
    }
}
BENCHMARK(BM_SamplePerspective)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void
BM_PushPullFill(benchmark::State &state) {
    const int w = static_cast<int>(state.range(0));
    const auto pano = noise_pano(w, w / 2);
    Mask hole(w, w / 2);
    for (int r = w / 8; r < w / 4; ++r) {
        for (int c = 0; c < w / 3; ++c) {
            hole(r, c) = 1;
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(inpaint_rgb(pano, hole));
    }
}
BENCHMARK(BM_PushPullFill)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void
BM_Ssim(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto a = to_color_image(noise_pano(2 * n, n));
    const auto b = to_color_image(noise_pano(2 * n, n));
    ColorImage grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim_with_grad(a, b, &grad));
    }
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
