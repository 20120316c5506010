// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"

namespace panolayers {

inline constexpr int kSsimWindow    = 11;
inline constexpr double kSsimSigma  = 1.5;
inline constexpr double kSsimC1     = 0.01 * 0.01;
inline constexpr double kSsimC2     = 0.03 * 0.03;

/// Mean SSIM over all pixels and channels, Gaussian window, zero padding.
double ssim(const ColorImage &a, const ColorImage &b);

/// Same value, plus d ssim / d a when `grad_a` is non-null.
double ssim_with_grad(const ColorImage &a, const ColorImage &b, ColorImage *grad_a);

inline double
d_ssim(double s) {
    return 0.5 * (1.0 - s);
}

} // namespace panolayers
