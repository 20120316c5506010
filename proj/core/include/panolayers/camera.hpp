// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace panolayers {

/// Pinhole intrinsics. Pixel (u, v) samples the continuous image position
/// (u, v); the principal point sits at (width/2, height/2).
struct CameraIntrinsics {
    double fov_x = kPi / 2.0;
    double fov_y = kPi / 2.0;
    int width    = 512;
    int height   = 512;

    double fx() const;
    double fy() const;
    double cx() const { return 0.5 * width; }
    double cy() const { return 0.5 * height; }

    /// Throws Config unless 0 < fov < pi and the image is non-empty.
    void validate() const;
};

/// A perspective camera looking along the direction (yaw, pitch): yaw is the
/// longitude of the view axis, pitch its latitude (positive looks up).
struct CameraView {
    CameraIntrinsics intrinsics;
    double yaw   = 0.0;
    double pitch = 0.0;
    Point3 position = Point3::Zero();

    /// Rows are the camera axes in world coordinates: right, down, forward.
    /// Image columns grow along `right`, rows along `down`; `right` always
    /// points toward decreasing longitude so views are not mirrored with
    /// respect to the panorama.
    Eigen::Matrix3d world_to_camera() const;

    Point3 forward() const;

    /// Unit world-space ray through continuous pixel (u, v).
    Point3 pixel_ray(double u, double v) const;
};

struct CameraRig {
    std::vector<CameraView> views;
};

struct SphericalDirectionDeg {
    int theta_deg = 0;
    int phi_deg   = 0;
};

/// Directions on a 1-degree (theta, phi) grid that fall outside every view
/// frustum of the rig (positions are ignored).
std::vector<SphericalDirectionDeg> find_uncovered_directions(std::span<const CameraView> views);

/// Views at yaw = 2*pi*k/yaw_count for each pitch row (yaw varies fastest),
/// followed by straight-up and straight-down views when include_poles is set.
/// Throws Coverage when the rig leaves part of the sphere unobserved.
CameraRig build_rig(const CameraIntrinsics &intrinsics, int yaw_count, std::span<const double> pitch_rows,
                    bool include_poles);

/// 90x90 degree, 512x512 views: 8 yaws x pitch {-45, 0, 45} degrees + 2 poles.
CameraRig build_default_rig(int resolution = 512);

/// Views with even / odd index: the train / held-out split.
CameraRig select_parity(const CameraRig &rig, int parity);

double deg_to_rad(double deg);

} // namespace panolayers
