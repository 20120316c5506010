// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/rasterizer.hpp"

#include <optional>

namespace panolayers {

inline constexpr double kPsnrCap = 99.0;

/// Over masked pixels when a mask is given; capped at kPsnrCap.
double psnr(const ColorImage &a, const ColorImage &b, const Mask *mask = nullptr);

/// Fraction of pixels whose accumulated alpha is below the threshold.
double count_holes(const RenderedView &render, double alpha_threshold = 0.5);

/// Mean distance from the origin over every splat outside the sky layer.
double mean_scene_depth(const SplatScene &scene);

} // namespace panolayers
