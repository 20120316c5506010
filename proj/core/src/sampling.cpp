// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace panolayers {
namespace {

int
wrap_col(long long col, int width) {
    long long m = col % width;
    return static_cast<int>(m < 0 ? m + width : m);
}

int
clamp_row(long long row, int height) {
    return static_cast<int>(std::clamp<long long>(row, 0, height - 1));
}

template <typename Fn>
void
for_each_ray(const CameraView &view, PanoDims dims, Fn &&fn) {
    const auto &in        = view.intrinsics;
    const Eigen::Matrix3d to_world = view.world_to_camera().transpose();
    const double fx = in.fx(), fy = in.fy(), cx = in.cx(), cy = in.cy();
    for (int v = 0; v < in.height; ++v) {
        for (int u = 0; u < in.width; ++u) {
            const Point3 cam((u - cx) / fx, (v - cy) / fy, 1.0);
            const Point3 ray = to_world * cam;
            fn(v, u, angles_to_pixel(direction_of(ray), dims));
        }
    }
}

void
require_equirect(int width, int height, const char *what) {
    if (height <= 0 || width != 2 * height) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a 2:1 equirectangular image, got " +
                                                      std::to_string(width) + "x" + std::to_string(height));
    }
}

} // namespace

Rgb
sample_bilinear(const Panorama &pano, PixelCoord coord) {
    const double r0f = std::floor(coord.row);
    const double c0f = std::floor(coord.col);
    const float fr   = static_cast<float>(coord.row - r0f);
    const float fc   = static_cast<float>(coord.col - c0f);
    const auto r0 = static_cast<long long>(r0f);
    const auto c0 = static_cast<long long>(c0f);
    const int ra = clamp_row(r0, pano.height());
    const int rb = clamp_row(r0 + 1, pano.height());
    const int ca = wrap_col(c0, pano.width());
    const int cb = wrap_col(c0 + 1, pano.width());
    const Rgb top    = pano(ra, ca) * (1.0f - fc) + pano(ra, cb) * fc;
    const Rgb bottom = pano(rb, ca) * (1.0f - fc) + pano(rb, cb) * fc;
    return top * (1.0f - fr) + bottom * fr;
}

std::uint8_t
sample_nearest(const Mask &mask, PixelCoord coord) {
    const auto r = static_cast<long long>(std::floor(coord.row + 0.5));
    const auto c = static_cast<long long>(std::floor(coord.col + 0.5));
    return mask(clamp_row(r, mask.height()), wrap_col(c, mask.width())) ? 1 : 0;
}

PixelCoord
linear_angle_coords(double x, double y, double fov_x, double fov_y, double theta0, double phi0, PanoDims dims) {
    const double xe = (x * fov_x + 2.0 * theta0 + 2.0 * kPi) / (4.0 * kPi) * dims.width;
    const double ye = (y * fov_y + 2.0 * phi0 + kPi) / (4.0 * kPi) * dims.height;
    return {ye, xe};
}

Panorama
sample_perspective(const Panorama &pano, const CameraView &view, SampleMode mode) {
    const auto &in = view.intrinsics;
    in.validate();
    require_equirect(pano.width(), pano.height(), "panorama");
    const PanoDims dims{pano.height(), pano.width()};
    Panorama out(in.width, in.height);

    if (mode == SampleMode::Gnomonic) {
        for_each_ray(view, dims, [&](int v, int u, PixelCoord pc) { out(v, u) = sample_bilinear(pano, pc); });
        return out;
    }

    const double half_w = 0.5 * in.width;
    const double half_h = 0.5 * in.height;
    const double theta0 = -view.yaw;
    const double phi0   = 0.5 * kPi - view.pitch;
    for (int v = 0; v < in.height; ++v) {
        const double y = (v - half_h) / half_h;
        for (int u = 0; u < in.width; ++u) {
            const double x = (u - half_w) / half_w;
            out(v, u)      = sample_bilinear(pano, linear_angle_coords(x, y, in.fov_x, in.fov_y, theta0, phi0, dims));
        }
    }
    return out;
}

Mask
project_mask(const Mask &mask, const CameraView &view) {
    view.intrinsics.validate();
    require_equirect(mask.width(), mask.height(), "panorama mask");
    Mask out(view.intrinsics.width, view.intrinsics.height);
    for_each_ray(view, {mask.height(), mask.width()},
                 [&](int v, int u, PixelCoord pc) { out(v, u) = sample_nearest(mask, pc); });
    return out;
}

} // namespace panolayers
