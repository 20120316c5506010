// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/camera.hpp"
#include "panolayers/geometry.hpp"
#include "panolayers/sampling.hpp"

#include "synthetic_scene.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace panolayers {
namespace {

TEST(Geometry, CenterPixelLooksAlongPlusX) {
    const PanoDims dims{1024, 2048};
    const auto a = pixel_to_angles(512, 1024, dims);
    EXPECT_DOUBLE_EQ(a.theta, kPi / 2.0);
    EXPECT_DOUBLE_EQ(a.phi, 0.0);
    const Point3 d = direction_vector(a);
    EXPECT_NEAR(d.x(), 1.0, 1e-15);
    EXPECT_NEAR(d.y(), 0.0, 1e-15);
    EXPECT_NEAR(d.z(), 0.0, 1e-15);
}

TEST(Geometry, TopRowIsNorthPole) {
    const PanoDims dims{1024, 2048};
    for (int c : {0, 17, 1024, 2047}) {
        const Point3 d = direction_vector(pixel_to_angles(0, c, dims));
        EXPECT_NEAR(d.y(), 1.0, 1e-15);
    }
}

TEST(Geometry, LongitudeStaysInHalfOpenInterval) {
    EXPECT_DOUBLE_EQ(normalize_longitude(kPi), kPi);
    EXPECT_DOUBLE_EQ(normalize_longitude(-kPi), kPi);
    EXPECT_NEAR(normalize_longitude(3.0 * kPi + 0.25), -kPi + 0.25, 1e-12);
    const PanoDims dims{256, 512};
    EXPECT_DOUBLE_EQ(pixel_to_angles(10, 0, dims).phi, kPi);
}

TEST(Geometry, OutOfRangePixelThrows) {
    const PanoDims dims{256, 512};
    EXPECT_THROW(pixel_to_angles(-1, 0, dims), Error);
    EXPECT_THROW(pixel_to_angles(0, 512, dims), Error);
    EXPECT_THROW(pixel_to_angles(256, 3, dims), Error);
}

TEST(Geometry, PixelAngleRoundTrip) {
    const PanoDims dims{1024, 2048};
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> rows(1, dims.height - 1), cols(0, dims.width - 1);
    for (int i = 0; i < 10000; ++i) {
        const int r = rows(rng), c = cols(rng);
        const auto back = angles_to_pixel(direction_of(direction_vector(pixel_to_angles(r, c, dims))), dims);
        EXPECT_NEAR(back.row, r, 0.5);
        double dc = std::fmod(back.col - c + dims.width, static_cast<double>(dims.width));
        dc        = std::min(dc, dims.width - dc);
        EXPECT_LT(dc, 0.5);
    }
}

TEST(Geometry, UnprojectHasRequestedRadius) {
    const PanoDims dims{256, 512};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> depth(0.05, 500.0);
    for (int i = 0; i < 2000; ++i) {
        const double d = depth(rng);
        const Point3 p = unproject(static_cast<int>(rng() % 256), static_cast<int>(rng() % 512), d, dims);
        EXPECT_NEAR(p.norm() / d, 1.0, 1e-12);
    }
}

TEST(Geometry, UnprojectRejectsBadDepth) {
    const PanoDims dims{256, 512};
    EXPECT_THROW(unproject(1, 1, 0.0, dims), Error);
    EXPECT_THROW(unproject(1, 1, -2.0, dims), Error);
    EXPECT_THROW(unproject(1, 1, std::nan(""), dims), Error);
}

TEST(Geometry, ProjectPointInvertsUnproject) {
    const PanoDims dims{256, 512};
    const Point3 p        = unproject(100, 300, 7.5, dims);
    const auto projected  = project_point(p);
    const auto expected   = pixel_to_angles(100, 300, dims);
    EXPECT_NEAR(projected.depth, 7.5, 1e-12);
    EXPECT_NEAR(projected.direction.theta, expected.theta, 1e-12);
    EXPECT_NEAR(projected.direction.phi, expected.phi, 1e-12);
    EXPECT_THROW(project_point(Point3::Zero()), Error);
}

TEST(Camera, ForwardRayMatchesYawPitch) {
    CameraView view;
    view.yaw   = 0.7;
    view.pitch = -0.3;
    const Point3 ray = view.pixel_ray(view.intrinsics.cx(), view.intrinsics.cy());
    EXPECT_NEAR((ray - view.forward()).norm(), 0.0, 1e-12);
    const auto dir = direction_of(ray);
    EXPECT_NEAR(dir.phi, 0.7, 1e-12);
    EXPECT_NEAR(dir.theta, kPi / 2.0 + 0.3, 1e-12);
}

TEST(Camera, ImageIsNotMirrored) {
    // Columns to the right of centre move toward decreasing longitude, as in the panorama.
    CameraView view;
    const auto right = direction_of(view.pixel_ray(400, 256));
    EXPECT_LT(right.phi, 0.0);
    const auto down = direction_of(view.pixel_ray(256, 400));
    EXPECT_GT(down.theta, kPi / 2.0);
}

TEST(Camera, WorldToCameraIsRotation) {
    CameraView view;
    view.yaw   = -2.1;
    view.pitch = 0.9;
    const Eigen::Matrix3d m = view.world_to_camera();
    EXPECT_NEAR((m * m.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-12);
    // Columns run toward decreasing longitude, so the view basis is a
    // reflection of the world basis.
    EXPECT_NEAR(m.determinant(), -1.0, 1e-12);
}

TEST(Camera, DefaultRigHas26ViewsAndCoversSphere) {
    const auto rig = build_default_rig(64);
    EXPECT_EQ(rig.views.size(), 26u);
    EXPECT_TRUE(find_uncovered_directions(rig.views).empty());
}

TEST(Camera, SingleViewRigFailsCoverage) {
    CameraIntrinsics intr;
    const std::array<double, 1> rows{0.0};
    try {
        build_rig(intr, 1, rows, false);
        FAIL() << "expected coverage error";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::Coverage);
    }
}

TEST(Camera, FourWideViewsWithPolesAgreeWithBruteForce) {
    CameraIntrinsics intr;
    intr.fov_x = intr.fov_y = deg_to_rad(120.0);
    const std::array<double, 1> rows{0.0};
    std::vector<CameraView> views;
    for (int k = 0; k < 4; ++k) {
        CameraView v;
        v.intrinsics = intr;
        v.yaw        = normalize_longitude(2.0 * kPi * k / 4);
        views.push_back(v);
    }
    for (double p : {kPi / 2.0, -kPi / 2.0}) {
        CameraView v;
        v.intrinsics = intr;
        v.pitch      = p;
        views.push_back(v);
    }
    // Brute force: a direction is seen when it lies in front of some camera within both half-angles.
    const double t = std::tan(deg_to_rad(60.0)) + 1e-12;
    bool all       = true;
    for (int th = 0; th <= 180; ++th) {
        for (int ph = -179; ph <= 180; ++ph) {
            const Point3 d = direction_vector({deg_to_rad(th), deg_to_rad(ph)});
            bool seen      = false;
            for (const auto &v : views) {
                const Point3 c = v.world_to_camera() * d;
                seen |= c.z() > 0.0 && std::abs(c.x() / c.z()) <= t && std::abs(c.y() / c.z()) <= t;
            }
            all &= seen;
        }
    }
    bool built = true;
    try {
        build_rig(intr, 4, rows, true);
    } catch (const Error &) {
        built = false;
    }
    EXPECT_EQ(built, all);
}

TEST(Camera, ParitySplitsRig) {
    const auto rig  = build_default_rig(32);
    const auto even = select_parity(rig, 0);
    const auto odd  = select_parity(rig, 1);
    EXPECT_EQ(even.views.size() + odd.views.size(), rig.views.size());
    EXPECT_DOUBLE_EQ(odd.views[0].yaw, rig.views[1].yaw);
}

TEST(Sampling, GnomonicCenterMatchesDirectEvaluation) {
    const auto pano = testsupport::smooth_panorama(2048, 1024);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> yaw(-kPi, kPi), pitch(-1.2, 1.2);
    CameraIntrinsics intr;
    intr.width = intr.height = 64;
    for (int i = 0; i < 20; ++i) {
        CameraView view;
        view.intrinsics  = intr;
        view.yaw         = yaw(rng);
        view.pitch       = pitch(rng);
        const auto img   = sample_perspective(pano, view);
        const Rgb direct = testsupport::smooth_color(view.forward());
        EXPECT_LT((img(32, 32) - direct).cwiseAbs().maxCoeff(), 1.0f / 255.0f);
    }
}

TEST(Sampling, GnomonicMatchesPinholeRenderOfScene) {
    const auto fixture = testsupport::render_fixture(2048, 1024);
    CameraView view;
    view.intrinsics.width = view.intrinsics.height = 64;
    view.yaw                                       = 0.4;
    const auto sampled = sample_perspective(fixture.pano, view);
    const auto direct  = testsupport::render_pinhole(view);
    double err         = 0.0;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        err += (sampled[i] - direct[i]).cwiseAbs().mean();
    }
    EXPECT_LT(err / sampled.size(), 2.0 / 255.0);
}

TEST(Sampling, BilinearWrapsLongitude) {
    Panorama pano(8, 4, Rgb::Zero());
    pano(1, 7) = Rgb::Ones();
    const Rgb v = sample_bilinear(pano, {1.0, 7.5});
    EXPECT_FLOAT_EQ(v.x(), 0.5f);
    const Rgb w = sample_bilinear(pano, {1.0, -0.5});
    EXPECT_FLOAT_EQ(w.x(), 0.5f);
}

TEST(Sampling, RejectsNonEquirectangular) {
    Panorama pano(10, 10);
    EXPECT_THROW(sample_perspective(pano, CameraView{}), Error);
}

TEST(Sampling, LinearAngleCenterColumn) {
    const auto pc = linear_angle_coords(0.0, 0.0, kPi / 2.0, kPi / 2.0, 0.0, kPi / 2.0, {1024, 2048});
    EXPECT_EQ(pc.col, 1024.0);
    EXPECT_EQ(pc.row, 512.0);
}

TEST(Sampling, LinearAngleAgreesWithGnomonicAtEquatorCenters) {
    const auto pano = testsupport::smooth_panorama(512, 256);
    for (int k = 0; k < 8; ++k) {
        CameraView view;
        view.intrinsics.width = view.intrinsics.height = 64;
        view.yaw = 2.0 * kPi * k / 8.0 - kPi + 0.1;
        const auto g = sample_perspective(pano, view, SampleMode::Gnomonic);
        const auto l = sample_perspective(pano, view, SampleMode::LinearAngle);
        EXPECT_LT((g(32, 32) - l(32, 32)).cwiseAbs().maxCoeff(), 1.0f / 255.0f) << "yaw " << view.yaw;
    }
}

TEST(Sampling, ProjectMaskOfFullMaskIsFull) {
    Mask all(128, 64, 1);
    CameraView view;
    view.intrinsics.width = view.intrinsics.height = 16;
    const auto m = project_mask(all, view);
    EXPECT_EQ(count_set(m), m.size());
}

} // namespace
} // namespace panolayers
