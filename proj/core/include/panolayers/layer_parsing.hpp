// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace panolayers {

/// Scene strata, numbered near (0) to far (3).
enum class LayerIndex : std::uint8_t {
    Dynamic    = 0,
    Foreground = 1,
    Background = 2,
    Sky        = 3,
};

inline constexpr int kLayerCount = 4;
inline constexpr std::array<LayerIndex, kLayerCount> kAllLayers{LayerIndex::Dynamic, LayerIndex::Foreground,
                                                                LayerIndex::Background, LayerIndex::Sky};

constexpr int
to_int(LayerIndex layer) {
    return static_cast<int>(layer);
}

std::string_view layer_name(LayerIndex layer);

/// Accepts 0..3 or a case-insensitive layer name ("sky", "BACKGROUND", ...).
LayerIndex layer_from_json(const nlohmann::json &value);
std::optional<LayerIndex> layer_from_int(long long value);

using LabelImage = Image<std::uint16_t>;

/// Instance segmentation: one instance id per pixel plus the semantic label
/// of each id. An empty label marks a class-agnostic instance.
struct SegmentMap {
    LabelImage label_image;
    std::map<int, std::string> labels;

    /// Throws Validation if a pixel carries an id missing from `labels`.
    void validate() const;
};

struct LayerRule {
    std::string pattern;
    LayerIndex layer = LayerIndex::Background;
};

/// Ordered label matchers; the first matching rule wins. Patterns containing
/// glob metacharacters (* ? [) must match the whole label, other patterns are
/// substrings. Matching is case-insensitive and never matches an empty label.
struct LayerRules {
    std::vector<LayerRule> rules;
    std::optional<LayerIndex> default_layer;
};

using LayerAssignment = std::map<int, LayerIndex>;
using LayerMasks      = std::array<Mask, kLayerCount>;

bool rule_matches(std::string_view pattern, std::string_view label);

/// First matching rule for `label`, if any.
std::optional<LayerIndex> match_label(const LayerRules &rules, std::string_view label);

/// Throws UnclassifiedLabel listing every label that neither matches a rule
/// nor can fall back to the default layer.
LayerAssignment classify_segments(const SegmentMap &seg, const LayerRules &rules);

/// One mask per layer; the masks partition the pixel grid.
LayerMasks build_layer_masks(const SegmentMap &seg, const LayerAssignment &assignment);

/// sky/cloud -> SKY, building/terrain/road -> BACKGROUND,
/// tree/pole/sign/bench -> FOREGROUND, person/car/bicycle/animal -> DYNAMIC.
LayerRules default_layer_rules();

/// Either an ordered array of {pattern, layer} or {"rules": [...], "default": layer}.
LayerRules rules_from_json(const nlohmann::json &doc);
LayerRules load_rules(const std::string &path);

} // namespace panolayers
