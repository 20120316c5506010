// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/layer_parsing.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace panolayers {
namespace {

std::string
lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool
is_glob(std::string_view pattern) {
    return pattern.find_first_of("*?[") != std::string_view::npos;
}

} // namespace

std::string_view
layer_name(LayerIndex layer) {
    switch (layer) {
    case LayerIndex::Dynamic: return "dynamic";
    case LayerIndex::Foreground: return "foreground";
    case LayerIndex::Background: return "background";
    case LayerIndex::Sky: return "sky";
    }
    return "unknown";
}

std::optional<LayerIndex>
layer_from_int(long long value) {
    if (value < 0 || value >= kLayerCount) {
        return std::nullopt;
    }
    return static_cast<LayerIndex>(value);
}

LayerIndex
layer_from_json(const nlohmann::json &value) {
    if (value.is_number_integer()) {
        if (auto layer = layer_from_int(value.get<long long>())) {
            return *layer;
        }
    } else if (value.is_string()) {
        const std::string name = lowercase(value.get<std::string>());
        for (auto layer : kAllLayers) {
            if (name == layer_name(layer)) {
                return layer;
            }
        }
    }
    throw Error(ErrorCode::Config, "invalid layer value " + value.dump());
}

void
SegmentMap::validate() const {
    std::set<int> missing;
    for (auto id : label_image.pixels()) {
        if (!labels.contains(id)) {
            missing.insert(id);
        }
    }
    if (!missing.empty()) {
        std::string ids;
        for (int id : missing) {
            ids += (ids.empty() ? "" : ", ") + std::to_string(id);
        }
        throw Error(ErrorCode::Validation, "segment ids without a label: " + ids);
    }
}

bool
rule_matches(std::string_view pattern, std::string_view label) {
    if (label.empty()) {
        return false;
    }
    const std::string lp = lowercase(pattern);
    const std::string ll = lowercase(label);
    if (is_glob(lp)) {
        return fnmatch(lp.c_str(), ll.c_str(), 0) == 0;
    }
    return ll.find(lp) != std::string::npos;
}

std::optional<LayerIndex>
match_label(const LayerRules &rules, std::string_view label) {
    for (const auto &rule : rules.rules) {
        if (rule_matches(rule.pattern, label)) {
            return rule.layer;
        }
    }
    return std::nullopt;
}

LayerAssignment
classify_segments(const SegmentMap &seg, const LayerRules &rules) {
    LayerAssignment out;
    std::vector<std::string> unmatched;
    for (const auto &[id, label] : seg.labels) {
        if (auto layer = match_label(rules, label)) {
            out[id] = *layer;
        } else if (rules.default_layer) {
            out[id] = *rules.default_layer;
        } else {
            unmatched.push_back(std::to_string(id) + ":\"" + label + "\"");
        }
    }
    if (!unmatched.empty()) {
        std::string list;
        for (const auto &u : unmatched) {
            list += (list.empty() ? "" : ", ") + u;
        }
        throw Error(ErrorCode::UnclassifiedLabel, "no rule matches " + list);
    }
    return out;
}

LayerMasks
build_layer_masks(const SegmentMap &seg, const LayerAssignment &assignment) {
    const int w = seg.label_image.width();
    const int h = seg.label_image.height();
    LayerMasks masks{Mask(w, h), Mask(w, h), Mask(w, h), Mask(w, h)};
    for (std::size_t i = 0; i < seg.label_image.size(); ++i) {
        const auto it = assignment.find(seg.label_image[i]);
        if (it == assignment.end()) {
            throw Error(ErrorCode::UnclassifiedLabel,
                        "segment id " + std::to_string(seg.label_image[i]) + " has no layer assignment");
        }
        masks[to_int(it->second)][i] = 1;
    }
    return masks;
}

LayerRules
default_layer_rules() {
    LayerRules rules;
    const auto add = [&](std::initializer_list<const char *> patterns, LayerIndex layer) {
        for (const char *p : patterns) {
            rules.rules.push_back({p, layer});
        }
    };
    add({"person", "people", "pedestrian", "car", "bicycle", "motorcycle", "bus", "truck", "animal", "dog",
         "bird"},
        LayerIndex::Dynamic);
    add({"skyscraper"}, LayerIndex::Background);
    add({"sky", "cloud"}, LayerIndex::Sky);
    add({"tree", "pole", "sign", "bench", "lamp", "plant", "fence", "hydrant"}, LayerIndex::Foreground);
    add({"building", "terrain", "road", "ground", "wall", "mountain", "sidewalk", "grass", "floor", "water"},
        LayerIndex::Background);
    return rules;
}

LayerRules
rules_from_json(const nlohmann::json &doc) {
    LayerRules rules;
    const nlohmann::json *list = &doc;
    if (doc.is_object()) {
        for (const auto &[key, _] : doc.items()) {
            if (key != "rules" && key != "default") {
                throw Error(ErrorCode::Config, "unknown key in rules document: " + key);
            }
        }
        if (!doc.contains("rules")) {
            throw Error(ErrorCode::Config, "rules document has no \"rules\" array");
        }
        list = &doc.at("rules");
        if (doc.contains("default") && !doc.at("default").is_null()) {
            rules.default_layer = layer_from_json(doc.at("default"));
        }
    }
    if (!list->is_array()) {
        throw Error(ErrorCode::Config, "rules must be an array of {pattern, layer}");
    }
    for (const auto &entry : *list) {
        if (!entry.is_object() || !entry.contains("pattern") || !entry.contains("layer") ||
            !entry.at("pattern").is_string()) {
            throw Error(ErrorCode::Config, "malformed rule " + entry.dump());
        }
        rules.rules.push_back({entry.at("pattern").get<std::string>(), layer_from_json(entry.at("layer"))});
    }
    return rules;
}

LayerRules
load_rules(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open rules file " + path);
    }
    try {
        return rules_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Config, path + ": " + e.what());
    }
}

} // namespace panolayers
