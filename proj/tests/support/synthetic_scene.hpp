// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/camera.hpp"
#include "panolayers/image.hpp"
#include "panolayers/layer_parsing.hpp"
#include "panolayers/splat.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace panolayers::testsupport {

/// Street-like scene around the origin: ground disc and a surrounding wall
/// (background), a tree and a pole (foreground), a person (dynamic), sky.
struct SceneHit {
    double distance = 0.0; ///< 0 for sky
    int label       = 0;
    Rgb color;
};

inline constexpr int kSkyLabel      = 1;
inline constexpr int kBuildingLabel = 2;
inline constexpr int kRoadLabel     = 3;
inline constexpr int kTreeLabel     = 4;
inline constexpr int kPoleLabel     = 5;
inline constexpr int kPersonLabel   = 6;

std::map<int, std::string> scene_labels();

SceneHit trace_scene(const Point3 &origin, const Point3 &direction);

struct Fixture {
    Panorama pano;
    LabelImage labels;
    std::map<int, std::string> names;
    DepthMap depth;
};

Fixture render_fixture(int width, int height);

void write_fixture(const Fixture &fixture, const std::filesystem::path &dir);

/// Ground-truth pinhole render of the analytic scene.
Panorama render_pinhole(const CameraView &view);

/// Smooth analytic panorama, useful where interpolation error must be tiny.
Rgb smooth_color(const Point3 &direction);
Panorama smooth_panorama(int width, int height);

std::filesystem::path fixture_dir();

/// Random splat in front of a camera looking down +x, for gradient audits.
Splat random_splat(std::mt19937_64 &rng, double min_depth = 2.5, double max_depth = 5.0);

/// Three-layer self-reconstruction scene: sky shell, wall cylinder, foreground disks.
SplatScene reference_scene(std::uint64_t seed, int sky_count = 2000, int wall_count = 2000, int fg_count = 1000);

/// Perturbs every splat parameter by `level` relative noise.
SplatScene perturb_scene(const SplatScene &scene, double level, std::uint64_t seed);

} // namespace panolayers::testsupport
