// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/layer_stack.hpp"
#include "panolayers/splat.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace panolayers {

struct LayerPoint {
    Point3 position;
    Rgb color;
    int row = 0;
    int col = 0;
};

using LayerPoints        = std::vector<LayerPoint>;
using LayeredPointCloud  = std::map<LayerIndex, LayerPoints>;

struct InitConfig {
    int stride     = 2;
    double spread  = 1.0;  ///< multiplies the one-pixel angular footprint
    double opacity = 0.7;
};

/// One point per masked pixel on the stride grid (rows and columns divisible
/// by `stride`), row-major. Throws MissingDepth listing pixels without depth.
LayerPoints pano_to_points(const Panorama &layer_rgb, const DepthMap &layer_depth, const Mask &mask, int stride = 1);

/// Isotropic splats with identity rotation; scale = depth * (2 pi / width) *
/// stride * spread, i.e. the footprint of one source pixel at that depth.
std::vector<Splat> points_to_splats(const LayerPoints &points, int pano_width, const InitConfig &init = {});

/// Lifts every present layer over its extent.
LayeredPointCloud lift_stack_points(const LayerStack &stack, int stride);
SplatScene init_scene(const LayeredPointCloud &cloud, PanoDims dims, const InitConfig &init = {});

/// Single-surface baseline: each pixel lifted once, from the layer it belongs
/// to, with nothing recovered behind it. Stored under LayerIndex::Background.
SplatScene init_single_layer_scene(const LayerStack &stack, const InitConfig &init = {});

/// Binary little-endian PLY: float x, y, z; uchar red, green, blue, layer.
void write_point_cloud_ply(const std::filesystem::path &path, const LayeredPointCloud &cloud);

} // namespace panolayers
