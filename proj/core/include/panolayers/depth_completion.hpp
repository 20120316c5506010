// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"

namespace panolayers {

/// Minimum depth gap between a completed surface and the surface occluding it.
inline constexpr float kDepthEpsilon = 0.01f;

struct HarmonicSolverOptions {
    double tolerance   = 1e-4; ///< max |residual| relative to the largest boundary depth
    int max_iterations = 10000;
};

struct HarmonicSolveStats {
    int iterations          = 0;
    double relative_residual = 0.0;
};

/// Fills `hole` in `depth` with the discrete harmonic interpolant of the
/// surrounding known depth (4-neighbour Laplace, longitude wraps, rows end at
/// the poles, missing pixels outside the hole are excluded from the stencil).
/// Known pixels are returned bit-for-bit. Throws InsufficientBoundary if a
/// connected part of the hole has no known neighbour.
DepthMap harmonic_fill(const DepthMap &depth, const Mask &hole, const HarmonicSolverOptions &options = {},
                       HarmonicSolveStats *stats = nullptr);

/// harmonic_fill followed by the ordering clamp: every filled pixel ends at
/// least kDepthEpsilon behind `occluder_depth` where that depth is known.
/// `rgb` is the layer's recovered color; the harmonic baseline does not use it.
DepthMap complete_depth(const Panorama &rgb, const DepthMap &depth, const Mask &hole,
                        const DepthMap &occluder_depth, const HarmonicSolverOptions &options = {});

} // namespace panolayers
