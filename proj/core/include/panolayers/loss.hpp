// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"

#include <optional>

namespace panolayers {

struct LossValue {
    double loss  = 0.0;
    double l1    = 0.0;
    double dssim = 0.0;
};

struct LossResult {
    LossValue value;
    ColorImage grad; ///< d loss / d rendered color, zero outside the mask
};

/// (1 - lambda) * l1 + lambda * (1 - ssim) / 2
double combine_loss(double lambda, double l1, double ssim_value);

/// Masked photometric loss. Both images are zeroed outside the mask before
/// comparison; l1 averages over masked pixels and channels. Returns
/// std::nullopt when the mask is empty.
std::optional<LossResult> compute_loss(const ColorImage &render, const ColorImage &gt, const Mask &mask, double lambda,
                                       bool with_grad = true);

} // namespace panolayers
