// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/camera.hpp"
#include "panolayers/layer_stack.hpp"
#include "panolayers/loss.hpp"
#include "panolayers/rasterizer.hpp"
#include "panolayers/splat.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace panolayers {

struct LearningRates {
    double position      = 1.6e-4; ///< multiplied by the scene's spatial scale
    double rotation      = 1e-3;
    double log_scale     = 5e-3;
    double opacity_logit = 5e-2;
    double color         = 2.5e-3;
};

struct TrainConfig {
    double lambda = 0.2;
    std::map<LayerIndex, int> iterations{{LayerIndex::Sky, 3000},
                                         {LayerIndex::Background, 4000},
                                         {LayerIndex::Foreground, 3000},
                                         {LayerIndex::Dynamic, 3000}};
    LearningRates lr;
    double position_lr_scale = 0.0; ///< <= 0 selects the median splat distance from the origin
    double beta1             = 0.9;
    double beta2             = 0.999;
    double epsilon           = 1e-15;
    std::uint64_t seed       = 0;
    int resolution           = 512;
    int checkpoint_every     = 0;
    Rgbd background          = Rgbd::Zero();

    int iterations_for(LayerIndex layer) const;
    void validate() const;
};

struct SupervisionView {
    int view_index = 0;
    CameraView view;
    ColorImage gt;
    Mask mask;
};

struct LayerSupervision {
    LayerIndex layer = LayerIndex::Sky;
    std::vector<SupervisionView> views; ///< views with empty masks already dropped
};

/// gt = gnomonic sample of the layer's panorama; mask = projection of the
/// union of masks at or behind the layer.
LayerSupervision build_supervision(const LayerStack &stack, const CameraRig &rig, LayerIndex layer);

struct TrainRecord {
    int iter     = 0;
    LayerIndex layer = LayerIndex::Sky;
    int view     = 0;
    LossValue value;
};

void to_json(nlohmann::json &j, const TrainRecord &r);

struct TrainHooks {
    std::function<void(const TrainRecord &)> on_step;
    std::function<void(const SplatScene &, LayerIndex, int)> on_checkpoint;
};

/// Layers rendered while training `layer`: itself and everything behind it.
LayerFilter training_filter(LayerIndex layer);

double median_splat_distance(const SplatScene &scene);

/// Optimizes only the splats of `layer`; every other layer is left untouched.
/// Throws Divergence on a non-finite loss.
void train_layer(SplatScene &scene, LayerIndex layer, const LayerSupervision &supervision, const TrainConfig &config,
                 const TrainHooks &hooks = {});

/// Back-to-front: sky, background, foreground, then dynamic when kept.
void train_scene(SplatScene &scene, const LayerStack &stack, const CameraRig &rig, const TrainConfig &config,
                 const TrainHooks &hooks = {});

} // namespace panolayers
