// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "gradient_audit.hpp"

#include "synthetic_scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace panolayers::testsupport {

CameraView
audit_view(int size) {
    CameraView view;
    view.intrinsics.width  = size;
    view.intrinsics.height = size;
    return view;
}

ColorImage
random_weights(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ColorImage w(width, height);
    for (auto &v : w.pixels()) {
        v = Rgbd(u(rng), u(rng), u(rng));
    }
    return w;
}

double
probe_loss(std::span<const Splat> splats, const CameraView &view, const ColorImage &weights) {
    RasterSettings settings;
    settings.background = Rgbd(0.2, 0.3, 0.4);
    const auto out      = rasterize(splats, view, settings);
    double sum          = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sum += weights[i].dot(out.color[i]);
    }
    return sum;
}

GradientAuditResult
audit_gradients(const std::vector<Splat> &splats, const CameraView &view, const ColorImage &weights, double rel_tol,
                double abs_floor) {
    RasterSettings settings;
    settings.background = Rgbd(0.2, 0.3, 0.4);
    RasterContext ctx;
    rasterize(splats, view, settings, &ctx);
    const auto grads = rasterize_backward(splats, view, ctx, weights);

    GradientAuditResult result;
    std::vector<Splat> probe = splats;
    for (std::size_t s = 0; s < splats.size(); ++s) {
        const auto base     = splats[s].flat();
        const auto analytic = grads[s].flat();
        for (int k = 0; k < SplatParameters::kCount; ++k) {
            const double h = 1e-4 * std::max(std::abs(base[k]), 1.0);
            auto plus      = base;
            auto minus     = base;
            plus[k] += h;
            minus[k] -= h;
            probe[s].set_flat(plus);
            const double lp = probe_loss(probe, view, weights);
            probe[s].set_flat(minus);
            const double lm = probe_loss(probe, view, weights);
            probe[s].set_flat(base);
            const double numeric = (lp - lm) / (2.0 * h);
            const double err     = std::abs(analytic[k] - numeric);
            const double mag     = std::max(std::abs(analytic[k]), std::abs(numeric));
            ++result.checked;
            if (err <= rel_tol * mag + abs_floor) {
                ++result.passed;
            } else {
                result.worst_relative = std::max(result.worst_relative, err / mag);
            }
        }
    }
    return result;
}

std::vector<Splat>
random_audit_scene(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::vector<Splat> splats;
    for (int i = 0; i < count; ++i) {
        splats.push_back(random_splat(rng));
    }
    return splats;
}

} // namespace panolayers::testsupport
