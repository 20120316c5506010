// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/camera.hpp"

#include "panolayers/error.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <sstream>

namespace panolayers {

double
deg_to_rad(double deg) {
    return deg * kPi / 180.0;
}

double
CameraIntrinsics::fx() const {
    return 0.5 * width / std::tan(0.5 * fov_x);
}

double
CameraIntrinsics::fy() const {
    return 0.5 * height / std::tan(0.5 * fov_y);
}

void
CameraIntrinsics::validate() const {
    if (!(fov_x > 0.0 && fov_x < kPi) || !(fov_y > 0.0 && fov_y < kPi)) {
        throw Error(ErrorCode::Config, "field of view must lie in (0, pi)");
    }
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::Config, "camera image size must be positive");
    }
}

Point3
CameraView::forward() const {
    const double cp = std::cos(pitch);
    return {cp * std::cos(yaw), std::sin(pitch), cp * std::sin(yaw)};
}

Eigen::Matrix3d
CameraView::world_to_camera() const {
    const Point3 f = forward();
    const Point3 r(std::sin(yaw), 0.0, -std::cos(yaw));
    const Point3 d = r.cross(f);
    Eigen::Matrix3d m;
    m.row(0) = r.transpose();
    m.row(1) = d.transpose();
    m.row(2) = f.transpose();
    return m;
}

Point3
CameraView::pixel_ray(double u, double v) const {
    const Point3 cam((u - intrinsics.cx()) / intrinsics.fx(), (v - intrinsics.cy()) / intrinsics.fy(), 1.0);
    return (world_to_camera().transpose() * cam).normalized();
}

std::vector<SphericalDirectionDeg>
find_uncovered_directions(std::span<const CameraView> views) {
    struct Frustum {
        Eigen::Matrix3d rotation;
        double tan_x;
        double tan_y;
    };
    std::vector<Frustum> frusta;
    frusta.reserve(views.size());
    for (const auto &view : views) {
        frusta.push_back({view.world_to_camera(), std::tan(0.5 * view.intrinsics.fov_x) + 1e-12,
                          std::tan(0.5 * view.intrinsics.fov_y) + 1e-12});
    }

    std::vector<SphericalDirectionDeg> uncovered;
    for (int theta = 0; theta <= 180; ++theta) {
        for (int phi = -179; phi <= 180; ++phi) {
            const Point3 dir = direction_vector({deg_to_rad(theta), deg_to_rad(phi)});
            bool covered     = false;
            for (const auto &fr : frusta) {
                const Point3 t = fr.rotation * dir;
                if (t.z() > 0.0 && std::abs(t.x()) <= fr.tan_x * t.z() && std::abs(t.y()) <= fr.tan_y * t.z()) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                uncovered.push_back({theta, phi});
            }
        }
    }
    return uncovered;
}

CameraRig
build_rig(const CameraIntrinsics &intrinsics, int yaw_count, std::span<const double> pitch_rows,
          bool include_poles) {
    intrinsics.validate();
    if (yaw_count < 1) {
        throw Error(ErrorCode::Config, "yaw_count must be >= 1");
    }
    CameraRig rig;
    for (double pitch : pitch_rows) {
        for (int k = 0; k < yaw_count; ++k) {
            CameraView view;
            view.intrinsics = intrinsics;
            view.yaw        = normalize_longitude(2.0 * kPi * k / yaw_count);
            view.pitch      = pitch;
            rig.views.push_back(view);
        }
    }
    if (include_poles) {
        for (double pitch : {0.5 * kPi, -0.5 * kPi}) {
            CameraView view;
            view.intrinsics = intrinsics;
            view.pitch      = pitch;
            rig.views.push_back(view);
        }
    }

    const auto uncovered = find_uncovered_directions(rig.views);
    if (!uncovered.empty()) {
        std::ostringstream msg;
        msg << uncovered.size() << " of the 1-degree grid directions are not covered, e.g.";
        const std::size_t shown = std::min<std::size_t>(uncovered.size(), 8);
        for (std::size_t i = 0; i < shown; ++i) {
            msg << " (theta=" << uncovered[i].theta_deg << ", phi=" << uncovered[i].phi_deg << ")";
        }
        throw Error(ErrorCode::Coverage, msg.str());
    }
    return rig;
}

CameraRig
build_default_rig(int resolution) {
    CameraIntrinsics intrinsics;
    intrinsics.width  = resolution;
    intrinsics.height = resolution;
    const std::array<double, 3> rows{deg_to_rad(-45.0), 0.0, deg_to_rad(45.0)};
    return build_rig(intrinsics, 8, rows, true);
}

CameraRig
select_parity(const CameraRig &rig, int parity) {
    CameraRig out;
    for (std::size_t i = 0; i < rig.views.size(); ++i) {
        if (static_cast<int>(i % 2) == parity) {
            out.views.push_back(rig.views[i]);
        }
    }
    return out;
}

} // namespace panolayers
