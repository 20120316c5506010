// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <numbers>

namespace panolayers {

/// World frame: +y points at the top pole, the camera center is
/// the origin. Units are meters.
using Point3 = Eigen::Vector3d;

struct PanoDims {
    int height = 0;
    int width  = 0;
    bool operator==(const PanoDims &) const = default;
};

/// theta is the polar angle from the top pole in [0, pi]; phi is longitude in
/// (-pi, pi].
struct SphericalDirection {
    double theta = 0.0;
    double phi   = 0.0;
};

/// Continuous pixel position: row i, column j. Integer values land on pixel
/// sample positions.
struct PixelCoord {
    double row = 0.0;
    double col = 0.0;
};

/// Wraps an angle into (-pi, pi].
double normalize_longitude(double phi);

/// theta = pi*i/H, phi = pi - 2*pi*j/W. Throws Bounds for indices outside the
/// panorama.
SphericalDirection pixel_to_angles(int row, int col, PanoDims dims);

/// Same mapping as pixel_to_angles on continuous coordinates; total.
SphericalDirection coords_to_angles(PixelCoord coord, PanoDims dims);

/// Exact inverse of coords_to_angles for a normalized direction.
PixelCoord angles_to_pixel(SphericalDirection dir, PanoDims dims);

/// Unit vector (sin t cos p, cos t, sin t sin p).
Point3 direction_vector(SphericalDirection dir);

/// depth * direction_vector(pixel_to_angles(i, j)); the result has norm == depth.
/// Throws InvalidDepth for depth <= 0 or non-finite depth.
Point3 unproject(int row, int col, double depth, PanoDims dims);

struct ProjectedPoint {
    SphericalDirection direction;
    double depth = 0.0;
};

/// Inverse of unproject. phi is 0 on the poles. Throws DegeneratePoint for the
/// origin.
ProjectedPoint project_point(const Point3 &p);

/// Direction of a unit vector (not required to be normalized, must be non-zero).
SphericalDirection direction_of(const Point3 &v);

inline constexpr double kPi = std::numbers::pi;

} // namespace panolayers
