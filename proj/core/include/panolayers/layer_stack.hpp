// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/depth_completion.hpp"
#include "panolayers/geometry.hpp"
#include "panolayers/inpaint.hpp"
#include "panolayers/layer_parsing.hpp"

#include <array>
#include <vector>

namespace panolayers {

struct RecoveredLayer {
    Mask mask;      ///< pixels originally belonging to this layer
    Panorama rgb;   ///< complete panorama of this layer and everything behind it
    DepthMap depth; ///< 0 where the layer has no surface
};

/// Four-layer decomposition of a panorama with occluded content recovered.
struct LayerStack {
    std::array<RecoveredLayer, kLayerCount> layers;
    bool keep_dynamic = false;

    const RecoveredLayer &operator[](LayerIndex l) const { return layers[to_int(l)]; }
    RecoveredLayer &operator[](LayerIndex l) { return layers[to_int(l)]; }

    /// Layers that become splats: foreground, background and sky, plus
    /// dynamic when kept. Ordered far to near.
    std::vector<LayerIndex> present_layers() const;

    /// Pixels where layer `l` carries a surface: its own mask plus every
    /// nearer mask that was removed (the occluded content recovered for it).
    /// The sky covers the whole sphere.
    Mask extent(LayerIndex l) const;

    /// Pixels where layer `l` or anything behind it is what the panorama
    /// shows: the union of masks k >= l.
    Mask visibility(LayerIndex l) const;

    PanoDims dims() const { return {layers[0].mask.height(), layers[0].mask.width()}; }
};

struct StackOptions {
    InpaintOptions inpaint;
    bool keep_dynamic       = false;
    double sky_depth_factor = 2.0;
    HarmonicSolverOptions solver;
};

/// Constant sky depth: factor x the largest finite depth of the foreground
/// and background layers over their extents, on every pixel.
DepthMap assign_sky_depth(const LayerStack &stack, double factor = 2.0);

/// Number of pixels p in M_k where a deeper present layer l > k violates
/// D_l(p) >= D_k(p) + kDepthEpsilon.
std::size_t count_depth_order_violations(const LayerStack &stack);

/// Runs dynamic removal, near-to-far occlusion recovery and depth completion.
/// `fg_depth` is the estimated depth of the original panorama (0 = missing).
LayerStack build_layer_stack(const Panorama &pano, const LayerMasks &masks, const DepthMap &fg_depth,
                             const StackOptions &options = {});

} // namespace panolayers
