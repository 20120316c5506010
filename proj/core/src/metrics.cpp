// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/metrics.hpp"

#include <cmath>

namespace panolayers {

double
psnr(const ColorImage &a, const ColorImage &b, const Mask *mask) {
    require_same_dims(a, b, "psnr");
    if (mask) {
        require_same_dims(a, *mask, "psnr mask");
    }
    double sum    = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (mask && !(*mask)[i]) {
            continue;
        }
        sum += (a[i] - b[i]).squaredNorm();
        n += 3;
    }
    if (n == 0) {
        throw Error(ErrorCode::Validation, "psnr over an empty region");
    }
    const double mse = sum / static_cast<double>(n);
    if (mse <= 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

double
count_holes(const RenderedView &render, double alpha_threshold) {
    if (render.alpha.empty()) {
        return 0.0;
    }
    std::size_t holes = 0;
    for (double a : render.alpha.pixels()) {
        holes += a < alpha_threshold;
    }
    return static_cast<double>(holes) / static_cast<double>(render.alpha.size());
}

double
mean_scene_depth(const SplatScene &scene) {
    double sum    = 0.0;
    std::size_t n = 0;
    for (const auto &[layer, splats] : scene.layers) {
        if (layer == LayerIndex::Sky) {
            continue;
        }
        for (const auto &s : splats) {
            sum += s.position.norm();
            ++n;
        }
    }
    if (n == 0) {
        throw Error(ErrorCode::Validation, "scene has no splats outside the sky layer");
    }
    return sum / static_cast<double>(n);
}

} // namespace panolayers
