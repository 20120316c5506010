// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/camera.hpp"
#include "panolayers/image.hpp"

namespace panolayers {

enum class SampleMode {
    Gnomonic,   ///< exact pinhole rays through the panorama (default)
    LinearAngle, ///< linear angle mapping, kept for comparison
};

/// Bilinear lookup at a continuous panorama position. Longitude (columns)
/// wraps, latitude (rows) clamps.
Rgb sample_bilinear(const Panorama &pano, PixelCoord coord);

/// Nearest-neighbour lookup with the same wrap/clamp rules.
std::uint8_t sample_nearest(const Mask &mask, PixelCoord coord);

/// Linear perspective-to-panorama mapping: x, y are normalized image
/// coordinates in [-1, 1], theta0 the view longitude, phi0 the polar angle of
/// the view center.
PixelCoord linear_angle_coords(double x, double y, double fov_x, double fov_y, double theta0, double phi0,
                              PanoDims dims);

/// Perspective image of the panorama seen through `view`. The view position is
/// ignored: the panorama is a direction-only signal.
Panorama sample_perspective(const Panorama &pano, const CameraView &view, SampleMode mode = SampleMode::Gnomonic);

/// Nearest-neighbour perspective projection of a panorama mask along the
/// gnomonic rays.
Mask project_mask(const Mask &mask, const CameraView &view);

} // namespace panolayers
