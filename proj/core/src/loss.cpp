// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/loss.hpp"

#include "panolayers/ssim.hpp"

#include <cmath>

namespace panolayers {

double
combine_loss(double lambda, double l1, double ssim_value) {
    return (1.0 - lambda) * l1 + lambda * d_ssim(ssim_value);
}

std::optional<LossResult>
compute_loss(const ColorImage &render, const ColorImage &gt, const Mask &mask, double lambda, bool with_grad) {
    require_same_dims(render, gt, "loss render/gt");
    require_same_dims(render, mask, "loss mask");
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::Config, "lambda must lie in [0, 1]");
    }
    const std::size_t count = count_set(mask);
    if (count == 0) {
        return std::nullopt;
    }
    const int w = render.width(), h = render.height();
    ColorImage r(w, h, Rgbd::Zero()), g(w, h, Rgbd::Zero());
    for (std::size_t i = 0; i < render.size(); ++i) {
        if (mask[i]) {
            r[i] = render[i];
            g[i] = gt[i];
        }
    }
    const double l1_norm = 1.0 / (3.0 * static_cast<double>(count));
    double l1            = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (mask[i]) {
            l1 += (r[i] - g[i]).cwiseAbs().sum();
        }
    }
    l1 *= l1_norm;

    LossResult out;
    ColorImage ssim_grad;
    const double s  = ssim_with_grad(r, g, with_grad ? &ssim_grad : nullptr);
    out.value.l1    = l1;
    out.value.dssim = d_ssim(s);
    out.value.loss  = combine_loss(lambda, l1, s);
    if (with_grad) {
        out.grad = ColorImage(w, h, Rgbd::Zero());
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!mask[i]) {
                continue;
            }
            const Rgbd diff = r[i] - g[i];
            Rgbd sign;
            for (int c = 0; c < 3; ++c) {
                sign(c) = diff(c) > 0.0 ? 1.0 : (diff(c) < 0.0 ? -1.0 : 0.0);
            }
            out.grad[i] = (1.0 - lambda) * l1_norm * sign - 0.5 * lambda * ssim_grad[i];
        }
    }
    return out;
}

} // namespace panolayers
