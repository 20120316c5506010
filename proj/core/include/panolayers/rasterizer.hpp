// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/camera.hpp"
#include "panolayers/image.hpp"
#include "panolayers/splat.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace panolayers {

inline constexpr double kNearPlane          = 0.01;
inline constexpr double kCovarianceDilation = 0.3;
inline constexpr double kMaxAlpha           = 0.999;
inline constexpr double kMinTransmittance   = 1e-4;
inline constexpr double kCullSigma          = 3.0;
/// Beyond this many sigmas a splat contributes nothing; the falloff is
/// shifted so that it reaches zero there continuously.
inline constexpr double kFootprintSigma     = 5.0;
/// The projection Jacobian sees t.x / t.z and t.y / t.z clamped to this
/// multiple of the half field-of-view tangent.
inline constexpr double kJacobianClamp      = 1.3;

struct ProjectedGaussian {
    Eigen::Vector2d mean;       ///< pixel coordinates (u = column, v = row)
    Eigen::Matrix2d covariance; ///< px^2, dilated
    double depth = 0.0;         ///< camera-space z
};

/// std::nullopt when the splat is behind the near plane or its 3 sigma box
/// misses the image.
std::optional<ProjectedGaussian> project_gaussian(const Splat &splat, const CameraView &view);

Eigen::Matrix3d quaternion_to_rotation(const Eigen::Vector4d &q);

struct RenderedView {
    ColorImage color;
    Image<double> alpha;
    Image<double> depth; ///< weighted mean depth of the composited splats, 0 where alpha = 0
};

struct RasterSettings {
    Rgbd background = Rgbd::Zero();
    bool tiled      = true;
    int tile_size   = 16;
};

/// Per-render state kept for the backward pass.
struct RasterContext {
    struct Entry {
        int splat = 0;
        Eigen::Vector2d mean;
        Eigen::Matrix2d conic;
        Eigen::Vector3d color;
        double opacity = 0.0;
        double depth   = 0.0;
        int x0 = 0, x1 = -1, y0 = 0, y1 = -1; ///< inclusive pixel box of the evaluated footprint
    };
    int width     = 0;
    int height    = 0;
    int tile_size = 0; ///< 0 for the untiled path
    int tiles_x   = 0;
    std::vector<Entry> entries;             ///< visible splats, sorted front to back
    std::vector<std::vector<int>> tiles;    ///< entry indices per tile, front to back
    std::vector<int> last;                  ///< per pixel: one past the last list position composited
    std::vector<double> final_transmittance;
    Rgbd background = Rgbd::Zero();
};

/// Throws InvalidSplat on non-finite parameters.
RenderedView rasterize(std::span<const Splat> splats, const CameraView &view, const RasterSettings &settings = {},
                       RasterContext *context = nullptr);

/// Gradient of a scalar loss with respect to every splat parameter, given the
/// loss gradient with respect to the rendered color.
std::vector<SplatGradient> rasterize_backward(std::span<const Splat> splats, const CameraView &view,
                                              const RasterContext &context, const ColorImage &color_grad);

using LayerFilter = std::vector<LayerIndex>;

/// Splats of the selected layers concatenated in ascending layer order.
/// `offsets`, when given, receives the start of each selected layer.
std::vector<Splat> gather_splats(const SplatScene &scene, const LayerFilter &filter,
                                 std::map<LayerIndex, std::size_t> *offsets = nullptr);

/// Throws EmptyFilter when `filter` is empty.
RenderedView render_scene(const SplatScene &scene, const CameraView &view, const LayerFilter &filter,
                          const RasterSettings &settings = {});

LayerFilter all_layers();

} // namespace panolayers
