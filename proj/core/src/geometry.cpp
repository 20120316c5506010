// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/geometry.hpp"

#include "panolayers/error.hpp"

#include <cmath>
#include <string>

namespace panolayers {

double
normalize_longitude(double phi) {
    if (phi > -kPi && phi <= kPi) {
        return phi;
    }
    double wrapped = std::remainder(phi, 2.0 * kPi); // [-pi, pi]
    if (wrapped <= -kPi) {
        wrapped += 2.0 * kPi;
    }
    return wrapped;
}

SphericalDirection
pixel_to_angles(int row, int col, PanoDims dims) {
    if (row < 0 || row >= dims.height || col < 0 || col >= dims.width) {
        throw Error(ErrorCode::Bounds, "pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                                           ") outside " + std::to_string(dims.height) + "x" +
                                           std::to_string(dims.width) + " panorama");
    }
    return coords_to_angles({static_cast<double>(row), static_cast<double>(col)}, dims);
}

SphericalDirection
coords_to_angles(PixelCoord coord, PanoDims dims) {
    const double theta = kPi * coord.row / dims.height;
    const double phi   = -2.0 * kPi * coord.col / dims.width + kPi;
    return {theta, normalize_longitude(phi)};
}

PixelCoord
angles_to_pixel(SphericalDirection dir, PanoDims dims) {
    const double row = dir.theta * dims.height / kPi;
    const double col = (kPi - dir.phi) * dims.width / (2.0 * kPi);
    return {row, col};
}

Point3
direction_vector(SphericalDirection dir) {
    const double st = std::sin(dir.theta);
    return {st * std::cos(dir.phi), std::cos(dir.theta), st * std::sin(dir.phi)};
}

Point3
unproject(int row, int col, double depth, PanoDims dims) {
    if (!(depth > 0.0) || !std::isfinite(depth)) {
        throw Error(ErrorCode::InvalidDepth, "depth " + std::to_string(depth) + " at pixel (" +
                                                 std::to_string(row) + ", " + std::to_string(col) + ")");
    }
    return depth * direction_vector(pixel_to_angles(row, col, dims));
}

SphericalDirection
direction_of(const Point3 &v) {
    const double horizontal = std::hypot(v.x(), v.z());
    const double theta      = std::atan2(horizontal, v.y());
    double phi              = 0.0;
    if (horizontal > 0.0) {
        phi = normalize_longitude(std::atan2(v.z(), v.x()));
    }
    return {theta, phi};
}

ProjectedPoint
project_point(const Point3 &p) {
    const double depth = p.norm();
    if (!(depth > 0.0) || !std::isfinite(depth)) {
        throw Error(ErrorCode::DegeneratePoint, "cannot project a zero-norm or non-finite point");
    }
    return {direction_of(p), depth};
}

} // namespace panolayers
