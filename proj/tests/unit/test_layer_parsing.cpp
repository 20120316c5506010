// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/adapter.hpp"
#include "panolayers/layer_parsing.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>

namespace panolayers {
namespace {

SegmentMap
make_seg(int w, int h, const std::vector<std::uint16_t> &ids, std::map<int, std::string> labels) {
    SegmentMap seg{LabelImage(w, h), std::move(labels)};
    for (std::size_t i = 0; i < seg.label_image.size(); ++i) {
        seg.label_image[i] = ids[i % ids.size()];
    }
    return seg;
}

TEST(LayerParsing, LayerOrderingIsNearToFar) {
    EXPECT_LT(to_int(LayerIndex::Dynamic), to_int(LayerIndex::Foreground));
    EXPECT_LT(to_int(LayerIndex::Foreground), to_int(LayerIndex::Background));
    EXPECT_LT(to_int(LayerIndex::Background), to_int(LayerIndex::Sky));
    EXPECT_EQ(to_int(LayerIndex::Sky), 3);
}

TEST(LayerParsing, DefaultRulesClassifyCommonLabels) {
    const auto rules = default_layer_rules();
    EXPECT_EQ(match_label(rules, "sky"), LayerIndex::Sky);
    EXPECT_EQ(match_label(rules, "person"), LayerIndex::Dynamic);
    EXPECT_EQ(match_label(rules, "Pedestrian crossing"), LayerIndex::Dynamic);
    EXPECT_EQ(match_label(rules, "tree"), LayerIndex::Foreground);
    EXPECT_EQ(match_label(rules, "building"), LayerIndex::Background);
    EXPECT_EQ(match_label(rules, "skyscraper"), LayerIndex::Background);
    EXPECT_EQ(match_label(rules, "gargoyle"), std::nullopt);
}

TEST(LayerParsing, UnmatchedLabelWithoutDefaultIsAnError) {
    const auto seg = make_seg(4, 2, {1, 2}, {{1, "sky"}, {2, "gargoyle"}});
    try {
        classify_segments(seg, default_layer_rules());
        FAIL() << "expected unclassified label";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnclassifiedLabel);
        EXPECT_NE(std::string(e.what()).find("gargoyle"), std::string::npos);
    }
    auto rules          = default_layer_rules();
    rules.default_layer = LayerIndex::Background;
    EXPECT_EQ(classify_segments(seg, rules).at(2), LayerIndex::Background);
}

TEST(LayerParsing, EmptyLabelNeverMatchesARule) {
    LayerRules rules{{{"*", LayerIndex::Foreground}}, std::nullopt};
    EXPECT_EQ(match_label(rules, ""), std::nullopt);
}

TEST(LayerParsing, FirstMatchWinsAndGlobsWork) {
    LayerRules rules{{{"tree*", LayerIndex::Foreground}, {"tree", LayerIndex::Background}}, std::nullopt};
    EXPECT_EQ(match_label(rules, "Treeline"), LayerIndex::Foreground);
    EXPECT_EQ(match_label(rules, "street tree"), LayerIndex::Background);
    EXPECT_EQ(match_label(rules, "bush"), std::nullopt);
    EXPECT_EQ(match_label(rules, "tree trunk"), LayerIndex::Foreground);
    EXPECT_TRUE(rule_matches("TREE", "old tree"));
    EXPECT_TRUE(rule_matches("c?r", "car"));
    EXPECT_FALSE(rule_matches("c?r", "cart"));
}

TEST(LayerParsing, MovingSpecificPatternEarlierNeverLowersItsMatches) {
    const std::vector<std::string> labels{"tree", "street tree", "pole", "tree pole", "sky", "treetop", "bus"};
    LayerRules late{{{"pole", LayerIndex::Foreground}, {"*tree*", LayerIndex::Background}, {"tree pole", LayerIndex::Dynamic}},
                    std::nullopt};
    LayerRules early{{{"tree pole", LayerIndex::Dynamic}, {"pole", LayerIndex::Foreground}, {"*tree*", LayerIndex::Background}},
                     std::nullopt};
    int late_hits = 0, early_hits = 0;
    for (const auto &l : labels) {
        late_hits += match_label(late, l) == LayerIndex::Dynamic;
        early_hits += match_label(early, l) == LayerIndex::Dynamic;
    }
    EXPECT_GE(early_hits, late_hits);
}

TEST(LayerParsing, MasksPartitionAndCountsMatchLabels) {
    std::mt19937_64 rng(5);
    LabelImage img(64, 32);
    std::map<int, std::size_t> tally;
    for (auto &v : img.pixels()) {
        v = static_cast<std::uint16_t>(1 + rng() % 4);
        ++tally[v];
    }
    SegmentMap seg{img, {{1, "person"}, {2, "tree"}, {3, "road"}, {4, "sky"}}};
    const auto masks = build_layer_masks(seg, classify_segments(seg, default_layer_rules()));
    for (std::size_t i = 0; i < img.size(); ++i) {
        EXPECT_EQ(masks[0][i] + masks[1][i] + masks[2][i] + masks[3][i], 1);
    }
    for (int l = 0; l < 4; ++l) {
        EXPECT_EQ(count_set(masks[l]), tally[l + 1]);
    }
}

TEST(LayerParsing, AllSkyGivesFullSkyMask) {
    const auto seg   = make_seg(8, 4, {1}, {{1, "sky"}});
    const auto masks = build_layer_masks(seg, classify_segments(seg, default_layer_rules()));
    EXPECT_EQ(count_set(masks[3]), 32u);
    EXPECT_EQ(count_set(masks[0]) + count_set(masks[1]) + count_set(masks[2]), 0u);
}

TEST(LayerParsing, ClassificationIsDeterministic) {
    const auto seg = make_seg(16, 8, {1, 2, 3}, {{1, "car"}, {2, "bench"}, {3, "cloud"}});
    EXPECT_EQ(build_layer_masks(seg, classify_segments(seg, default_layer_rules())),
              build_layer_masks(seg, classify_segments(seg, default_layer_rules())));
}

TEST(LayerParsing, SegmentMapRejectsUnknownIds) {
    const auto seg = make_seg(4, 2, {1, 9}, {{1, "sky"}});
    EXPECT_THROW(seg.validate(), Error);
}

TEST(LayerParsing, RulesJsonAcceptsArrayAndObjectForms) {
    const auto a = rules_from_json(nlohmann::json::parse(R"([{"pattern": "sky", "layer": 3}])"));
    EXPECT_EQ(a.rules.size(), 1u);
    const auto b = rules_from_json(
        nlohmann::json::parse(R"({"rules": [{"pattern": "tree", "layer": "foreground"}], "default": "background"})"));
    EXPECT_EQ(b.rules[0].layer, LayerIndex::Foreground);
    EXPECT_EQ(b.default_layer, LayerIndex::Background);
    EXPECT_THROW(rules_from_json(nlohmann::json::parse(R"({"rules": [], "extra": 1})")), Error);
    EXPECT_THROW(rules_from_json(nlohmann::json::parse(R"([{"pattern": "x", "layer": 9}])")), Error);
}

class AdapterResponse : public ::testing::Test {
protected:
    SegmentMap seg = make_seg(4, 2, {1, 2}, {{1, "sky"}, {2, "wall"}});
};

TEST_F(AdapterResponse, WellFormedIsAccepted) {
    const auto a = parse_assignment_response(R"({"assignments": {"1": 3, "2": 2}})", seg);
    EXPECT_EQ(a.at(1), LayerIndex::Sky);
    EXPECT_EQ(a.at(2), LayerIndex::Background);
}

TEST_F(AdapterResponse, OutOfRangeLayerIsRejected) {
    try {
        parse_assignment_response(R"({"assignments": {"1": 7, "2": 2}})", seg);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::AdapterProtocol);
    }
}

TEST_F(AdapterResponse, MissingIdIsRejected) {
    EXPECT_THROW(parse_assignment_response(R"({"assignments": {"1": 3}})", seg), Error);
}

TEST_F(AdapterResponse, MalformedAndUnknownIdsAreRejected) {
    EXPECT_THROW(parse_assignment_response("not json", seg), Error);
    EXPECT_THROW(parse_assignment_response(R"({"assignments": {"1": 3, "2": 2, "5": 1}})", seg), Error);
    EXPECT_THROW(parse_assignment_response(R"({"assign": {}})", seg), Error);
}

TEST_F(AdapterResponse, RequestCarriesLabelsAndImage) {
    const auto req = make_assignment_request(seg, "/tmp/p.png");
    EXPECT_EQ(req.at("labels").at("2"), "wall");
    EXPECT_EQ(req.at("image_path"), "/tmp/p.png");
}

TEST_F(AdapterResponse, ExternalProcessRoundTrip) {
    AdapterProcess proc({"/bin/sh", "-c", R"(read line; echo '{"assignments": {"1": 3, "2": 2}}')"});
    const auto a = request_adapter_assignment(seg, "/tmp/p.png", proc);
    EXPECT_EQ(a.at(1), LayerIndex::Sky);
}

TEST_F(AdapterResponse, SilentProcessTimesOut) {
    AdapterProcess proc({"/bin/sh", "-c", "sleep 5"}, std::chrono::milliseconds(200));
    try {
        request_adapter_assignment(seg, "/tmp/p.png", proc);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::AdapterProtocol);
    }
}

} // namespace
} // namespace panolayers
