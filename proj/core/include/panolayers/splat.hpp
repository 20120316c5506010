// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/geometry.hpp"
#include "panolayers/layer_parsing.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace panolayers {

/// The 14 optimizable values of a splat, in their unconstrained domain.
/// Also used to hold per-splat gradients.
struct SplatParameters {
    static constexpr int kCount = 14;

    Eigen::Vector3d position  = Eigen::Vector3d::Zero();
    Eigen::Vector4d rotation  = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0); ///< quaternion (w, x, y, z)
    Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
    double opacity_logit      = 0.0;
    Eigen::Vector3d color     = Eigen::Vector3d::Zero(); ///< clamped to [0,1] when rendered

    std::array<double, kCount> flat() const;
    void set_flat(const std::array<double, kCount> &values);

    bool operator==(const SplatParameters &) const = default;
};

using SplatGradient = SplatParameters;

struct Splat : SplatParameters {
    Eigen::Vector3d scale() const { return log_scale.array().exp(); }
    double opacity() const { return 1.0 / (1.0 + std::exp(-opacity_logit)); }
    bool finite() const;
};

inline double
logit(double p) {
    return std::log(p / (1.0 - p));
}

struct SplatScene {
    std::map<LayerIndex, std::vector<Splat>> layers;
    PanoDims pano;
    std::string units = "meters";

    std::size_t splat_count() const;
    bool operator==(const SplatScene &) const = default;
};

inline std::array<double, SplatParameters::kCount>
SplatParameters::flat() const {
    return {position.x(),  position.y(),  position.z(),  rotation(0), rotation(1),
            rotation(2),   rotation(3),   log_scale.x(), log_scale.y(), log_scale.z(),
            opacity_logit, color.x(),     color.y(),     color.z()};
}

inline void
SplatParameters::set_flat(const std::array<double, kCount> &v) {
    position      = {v[0], v[1], v[2]};
    rotation      = {v[3], v[4], v[5], v[6]};
    log_scale     = {v[7], v[8], v[9]};
    opacity_logit = v[10];
    color         = {v[11], v[12], v[13]};
}

inline bool
Splat::finite() const {
    for (double v : flat()) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return rotation.squaredNorm() > 0.0;
}

inline std::size_t
SplatScene::splat_count() const {
    std::size_t n = 0;
    for (const auto &[_, splats] : layers) {
        n += splats.size();
    }
    return n;
}

} // namespace panolayers
