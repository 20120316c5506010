// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/rasterizer.hpp"

#include <cstdint>
#include <vector>

namespace panolayers::testsupport {

struct GradientAuditResult {
    std::size_t checked = 0;
    std::size_t passed  = 0;
    double worst_relative = 0.0;
    double pass_rate() const { return checked == 0 ? 0.0 : static_cast<double>(passed) / checked; }
};

/// Camera at the origin looking down +x, `size` x `size` pixels, 90 degrees.
CameraView audit_view(int size);

/// Scalar probe loss sum(w * color) with weights in [-1, 1].
ColorImage random_weights(int width, int height, std::uint64_t seed);
double probe_loss(std::span<const Splat> splats, const CameraView &view, const ColorImage &weights);

/// Compares rasterize_backward against central differences on every scalar
/// parameter of `splats`. A parameter passes when
/// |analytic - numeric| <= rel_tol * max(|analytic|, |numeric|) + abs_floor.
GradientAuditResult audit_gradients(const std::vector<Splat> &splats, const CameraView &view,
                                    const ColorImage &weights, double rel_tol = 1e-3, double abs_floor = 1e-8);

/// `count` random splats in front of audit_view.
std::vector<Splat> random_audit_scene(std::uint64_t seed, int count);

} // namespace panolayers::testsupport
