// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/layer_stack.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace panolayers {
namespace {

Mask
union_of(const LayerMasks &masks, std::initializer_list<LayerIndex> layers) {
    Mask out(masks[0].width(), masks[0].height());
    for (auto l : layers) {
        const Mask &m = masks[to_int(l)];
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] |= m[i];
        }
    }
    return out;
}

bool
valid_depth(float d) {
    return d > 0.0f && std::isfinite(d);
}

} // namespace

std::vector<LayerIndex>
LayerStack::present_layers() const {
    std::vector<LayerIndex> out{LayerIndex::Sky, LayerIndex::Background, LayerIndex::Foreground};
    if (keep_dynamic) {
        out.push_back(LayerIndex::Dynamic);
    }
    return out;
}

Mask
LayerStack::extent(LayerIndex l) const {
    LayerMasks masks{layers[0].mask, layers[1].mask, layers[2].mask, layers[3].mask};
    switch (l) {
    case LayerIndex::Dynamic: return masks[0];
    case LayerIndex::Foreground:
        return keep_dynamic ? masks[1] : union_of(masks, {LayerIndex::Dynamic, LayerIndex::Foreground});
    case LayerIndex::Background:
        return union_of(masks, {LayerIndex::Dynamic, LayerIndex::Foreground, LayerIndex::Background});
    case LayerIndex::Sky: return Mask(masks[0].width(), masks[0].height(), 1);
    }
    return {};
}

Mask
LayerStack::visibility(LayerIndex l) const {
    Mask out(layers[0].mask.width(), layers[0].mask.height());
    for (int k = to_int(l); k < kLayerCount; ++k) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] |= layers[k].mask[i];
        }
    }
    return out;
}

DepthMap
assign_sky_depth(const LayerStack &stack, double factor) {
    double max_depth = 0.0;
    for (auto l : {LayerIndex::Foreground, LayerIndex::Background}) {
        const Mask ext       = stack.extent(l);
        const DepthMap &d    = stack[l].depth;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (ext[i] && valid_depth(d[i])) {
                max_depth = std::max(max_depth, static_cast<double>(d[i]));
            }
        }
    }
    if (!(max_depth > 0.0)) {
        throw Error(ErrorCode::MissingDepth, "no finite foreground/background depth to place the sky behind");
    }
    const auto dims = stack.dims();
    return DepthMap(dims.width, dims.height, static_cast<float>(factor * max_depth));
}

std::size_t
count_depth_order_violations(const LayerStack &stack) {
    std::size_t violations = 0;
    const auto n           = stack.layers[0].mask.size();
    for (int k = 0; k < kLayerCount; ++k) {
        for (int l = k + 1; l < kLayerCount; ++l) {
            const DepthMap &dk = stack.layers[k].depth;
            const DepthMap &dl = stack.layers[l].depth;
            for (std::size_t i = 0; i < n; ++i) {
                if (stack.layers[k].mask[i] && valid_depth(dk[i]) && valid_depth(dl[i]) && dl[i] < dk[i] + kDepthEpsilon) {
                    ++violations;
                }
            }
        }
    }
    return violations;
}

LayerStack
build_layer_stack(const Panorama &pano, const LayerMasks &masks, const DepthMap &fg_depth, const StackOptions &options) {
    require_same_dims(pano, fg_depth, "foreground depth");
    for (const auto &m : masks) {
        require_same_dims(pano, m, "layer mask");
    }
    const auto &m0 = masks[to_int(LayerIndex::Dynamic)];
    const auto &m1 = masks[to_int(LayerIndex::Foreground)];
    const auto &m2 = masks[to_int(LayerIndex::Background)];
    const auto &m3 = masks[to_int(LayerIndex::Sky)];

    LayerStack stack;
    stack.keep_dynamic = options.keep_dynamic;
    for (int l = 0; l < kLayerCount; ++l) {
        stack.layers[l].mask = masks[l];
    }

    // Color: each deeper layer inpaints the union of all nearer masks.
    const Mask near01  = union_of(masks, {LayerIndex::Dynamic, LayerIndex::Foreground});
    const Mask near012 = union_of(masks, {LayerIndex::Dynamic, LayerIndex::Foreground, LayerIndex::Background});
    stack[LayerIndex::Dynamic].rgb    = pano;
    stack[LayerIndex::Foreground].rgb = options.keep_dynamic ? pano : remove_layer(pano, m0, options.inpaint);
    stack[LayerIndex::Background].rgb = remove_layer(stack[LayerIndex::Foreground].rgb, near01, options.inpaint);
    if (count_set(m3) == 0) {
        spdlog::warn("panorama has no sky pixels; the sky layer reuses the background colors");
        stack[LayerIndex::Sky].rgb = stack[LayerIndex::Background].rgb;
    } else {
        stack[LayerIndex::Sky].rgb = remove_layer(stack[LayerIndex::Background].rgb, near012, options.inpaint);
    }

    // Depth. The dynamic layer keeps its own estimate; nearer layers occlude
    // deeper ones, so each completion is clamped behind the layer in front.
    const int w = pano.width();
    const int h = pano.height();
    DepthMap d0(w, h, 0.0f);
    DepthMap scene_depth(w, h, 0.0f);
    for (std::size_t i = 0; i < fg_depth.size(); ++i) {
        if (m0[i] && valid_depth(fg_depth[i])) {
            d0[i] = fg_depth[i];
        }
        if (!m3[i] && valid_depth(fg_depth[i])) {
            scene_depth[i] = fg_depth[i];
        }
    }
    stack[LayerIndex::Dynamic].depth = d0;

    Mask hole1 = m0;
    Mask hole2 = near01;
    for (std::size_t i = 0; i < hole1.size(); ++i) {
        if (m1[i] && !valid_depth(fg_depth[i])) {
            hole1[i] = 1;
        }
        if (m2[i] && !valid_depth(fg_depth[i])) {
            hole2[i] = 1;
        }
    }
    DepthMap d1 = complete_depth(stack[LayerIndex::Foreground].rgb, scene_depth, hole1, d0, options.solver);
    for (std::size_t i = 0; i < d1.size(); ++i) {
        if (m3[i]) {
            d1[i] = 0.0f;
        }
    }
    stack[LayerIndex::Foreground].depth = d1;

    DepthMap bg_known = scene_depth;
    DepthMap d2       = complete_depth(stack[LayerIndex::Background].rgb, bg_known, hole2, d1, options.solver);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        if (m3[i]) {
            d2[i] = 0.0f;
        }
    }
    stack[LayerIndex::Background].depth = d2;
    stack[LayerIndex::Sky].depth        = assign_sky_depth(stack, options.sky_depth_factor);

    if (const auto bad = count_depth_order_violations(stack); bad != 0) {
        throw Error(ErrorCode::Internal, std::to_string(bad) + " pixels violate the layer depth ordering after clamping");
    }
    return stack;
}

} // namespace panolayers
