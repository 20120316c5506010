// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/trainer.hpp"

#include "panolayers/sampling.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace panolayers {

int
TrainConfig::iterations_for(LayerIndex layer) const {
    const auto it = iterations.find(layer);
    return it == iterations.end() ? 0 : it->second;
}

void
TrainConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::Config, "lambda must lie in [0, 1]");
    }
    for (double lr_value : {lr.position, lr.rotation, lr.log_scale, lr.opacity_logit, lr.color}) {
        if (!(lr_value > 0.0)) {
            throw Error(ErrorCode::Config, "learning rates must be positive");
        }
    }
    for (const auto &[layer, n] : iterations) {
        if (n < 0) {
            throw Error(ErrorCode::Config, "iteration counts must be non-negative");
        }
    }
    if (resolution <= 0) {
        throw Error(ErrorCode::Config, "supervision resolution must be positive");
    }
}

void
to_json(nlohmann::json &j, const TrainRecord &r) {
    j = nlohmann::json{{"iter", r.iter},         {"layer", to_int(r.layer)}, {"view", r.view},
                       {"loss", r.value.loss}, {"l1", r.value.l1},          {"dssim", r.value.dssim}};
}

LayerSupervision
build_supervision(const LayerStack &stack, const CameraRig &rig, LayerIndex layer) {
    LayerSupervision sup;
    sup.layer             = layer;
    const Mask visibility = stack.visibility(layer);
    const Panorama &rgb   = stack[layer].rgb;
    for (std::size_t i = 0; i < rig.views.size(); ++i) {
        const auto &view = rig.views[i];
        Mask mask        = project_mask(visibility, view);
        if (count_set(mask) == 0) {
            continue;
        }
        sup.views.push_back({static_cast<int>(i), view, to_color_image(sample_perspective(rgb, view)), std::move(mask)});
    }
    return sup;
}

LayerFilter
training_filter(LayerIndex layer) {
    LayerFilter f;
    for (auto l : kAllLayers) {
        if (to_int(l) >= to_int(layer)) {
            f.push_back(l);
        }
    }
    return f;
}

double
median_splat_distance(const SplatScene &scene) {
    std::vector<double> d;
    for (const auto &[_, splats] : scene.layers) {
        for (const auto &s : splats) {
            d.push_back(s.position.norm());
        }
    }
    if (d.empty()) {
        return 1.0;
    }
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return std::max(*mid, 1e-6);
}

namespace {

class Adam {
public:
    Adam(std::size_t count, const TrainConfig &config, double position_scale)
        : mM(count), mV(count), mConfig(config) {
        const auto &lr = config.lr;
        mRates = {lr.position * position_scale, lr.position * position_scale, lr.position * position_scale,
                  lr.rotation, lr.rotation, lr.rotation, lr.rotation,
                  lr.log_scale, lr.log_scale, lr.log_scale,
                  lr.opacity_logit,
                  lr.color, lr.color, lr.color};
        for (auto &m : mM) {
            m.fill(0.0);
        }
        for (auto &v : mV) {
            v.fill(0.0);
        }
    }

    void step(std::span<Splat> params, std::span<const SplatGradient> grads) {
        ++mStep;
        const double b1 = mConfig.beta1, b2 = mConfig.beta2;
        const double c1 = 1.0 - std::pow(b1, mStep);
        const double c2 = 1.0 - std::pow(b2, mStep);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto p       = params[i].flat();
            const auto g = grads[i].flat();
            auto &m      = mM[i];
            auto &v      = mV[i];
            for (int k = 0; k < SplatParameters::kCount; ++k) {
                m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                p[k] -= mRates[k] * (m[k] / c1) / (std::sqrt(v[k] / c2) + mConfig.epsilon);
            }
            params[i].set_flat(p);
            params[i].rotation.normalize();
        }
    }

private:
    using Moments = std::array<double, SplatParameters::kCount>;
    std::vector<Moments> mM;
    std::vector<Moments> mV;
    Moments mRates{};
    const TrainConfig &mConfig;
    int mStep = 0;
};

void
train_layer_impl(SplatScene &scene, LayerIndex layer, const LayerSupervision &supervision, const TrainConfig &config,
                 const TrainHooks &hooks, double position_scale) {
    const int iterations = config.iterations_for(layer);
    auto it              = scene.layers.find(layer);
    if (iterations == 0 || it == scene.layers.end() || it->second.empty()) {
        return;
    }
    if (supervision.views.empty()) {
        spdlog::warn("layer {} has no supervised view; skipping", to_int(layer));
        return;
    }
    std::map<LayerIndex, std::size_t> offsets;
    std::vector<Splat> splats = gather_splats(scene, training_filter(layer), &offsets);
    const std::size_t count   = it->second.size();
    const std::span<Splat> own(splats.data() + offsets.at(layer), count);

    std::mt19937_64 rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (to_int(layer) + 1)));
    const std::size_t view_count = supervision.views.size();
    const std::size_t start      = rng() % view_count;

    Adam adam(count, config, position_scale);
    const RasterSettings settings{config.background, true, 16};
    RasterContext ctx;
    for (int iter = 0; iter < iterations; ++iter) {
        const auto &sv   = supervision.views[(start + static_cast<std::size_t>(iter)) % view_count];
        const auto frame = rasterize(splats, sv.view, settings, &ctx);
        auto loss        = compute_loss(frame.color, sv.gt, sv.mask, config.lambda);
        if (!std::isfinite(loss->value.loss)) {
            throw Error(ErrorCode::Divergence,
                        "non-finite loss at iteration " + std::to_string(iter) + " of layer " + std::to_string(to_int(layer)));
        }
        const auto grads = rasterize_backward(splats, sv.view, ctx, loss->grad);
        adam.step(own, std::span<const SplatGradient>(grads.data() + offsets.at(layer), count));
        if (hooks.on_step) {
            hooks.on_step({iter, layer, sv.view_index, loss->value});
        }
        if (config.checkpoint_every > 0 && (iter + 1) % config.checkpoint_every == 0 && hooks.on_checkpoint) {
            std::copy(own.begin(), own.end(), it->second.begin());
            hooks.on_checkpoint(scene, layer, iter + 1);
        }
    }
    std::copy(own.begin(), own.end(), it->second.begin());
}

} // namespace

void
train_layer(SplatScene &scene, LayerIndex layer, const LayerSupervision &supervision, const TrainConfig &config,
            const TrainHooks &hooks) {
    config.validate();
    const double scale = config.position_lr_scale > 0.0 ? config.position_lr_scale : median_splat_distance(scene);
    train_layer_impl(scene, layer, supervision, config, hooks, scale);
}

void
train_scene(SplatScene &scene, const LayerStack &stack, const CameraRig &rig, const TrainConfig &config,
            const TrainHooks &hooks) {
    config.validate();
    const double scale = config.position_lr_scale > 0.0 ? config.position_lr_scale : median_splat_distance(scene);
    for (auto layer : stack.present_layers()) {
        if (!scene.layers.contains(layer)) {
            continue;
        }
        spdlog::info("training layer {} ({}) for {} iterations", to_int(layer), layer_name(layer),
                     config.iterations_for(layer));
        const auto supervision = build_supervision(stack, rig, layer);
        train_layer_impl(scene, layer, supervision, config, hooks, scale);
    }
}

} // namespace panolayers
