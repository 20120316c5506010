// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/camera.hpp"
#include "panolayers/inpaint.hpp"
#include "panolayers/layer_stack.hpp"
#include "panolayers/lift.hpp"
#include "panolayers/metrics.hpp"
#include "panolayers/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace panolayers {

enum class ParserBackend { Rules, Adapter };

struct RigConfig {
    double fov_deg = 90.0;
    int resolution = 512;
    int yaw_count  = 8;
    std::vector<double> pitch_deg{-45.0, 0.0, 45.0};
    bool poles = true;

    CameraRig build() const;
};

struct EvalConfig {
    std::vector<double> offsets{0.1, 0.2, 0.3};
    double alpha_threshold = 0.5;
    int resolution         = 0; ///< held-out view size; 0 uses the rig resolution
};

struct PipelineConfig {
    std::filesystem::path panorama;
    std::filesystem::path segments;
    std::filesystem::path labels;
    std::filesystem::path rules; ///< empty selects the built-in rules
    std::filesystem::path depth;

    InpaintBackend inpaint_backend = InpaintBackend::Baseline;
    std::vector<std::string> inpaint_command;
    ParserBackend parser = ParserBackend::Rules;
    std::vector<std::string> parser_command;

    bool keep_dynamic       = false;
    std::uint64_t seed      = 0;
    int pano_width          = 2048; ///< 0 keeps the input resolution
    bool strict_aspect      = false;
    double sky_depth_factor = 2.0;

    InitConfig init;
    RigConfig rig;
    TrainConfig train;
    EvalConfig eval;

    std::filesystem::path out = "out";
    std::filesystem::path export_path; ///< empty selects <out>/export

    /// Relative paths resolve against `base_dir`. Unknown keys are rejected.
    static PipelineConfig from_json(const nlohmann::json &doc, const std::filesystem::path &base_dir = {});
    nlohmann::json to_json() const;

    /// Checks values and that every input file exists.
    void validate() const;
};

PipelineConfig load_config(const std::filesystem::path &path);

struct Workspace {
    std::filesystem::path root;

    std::filesystem::path ingest() const { return root / "ingest"; }
    std::filesystem::path build() const { return root / "build"; }
    std::filesystem::path train() const { return root / "train"; }
    std::filesystem::path render() const { return root / "render"; }
    std::filesystem::path eval() const { return root / "eval"; }
    std::filesystem::path init_bundle() const { return build() / "init_bundle"; }
    std::filesystem::path trained_bundle() const { return train() / "bundle"; }
};

void save_stack(const LayerStack &stack, const std::filesystem::path &dir);
LayerStack load_stack(const std::filesystem::path &dir);

struct TrajectoryPose {
    double yaw   = 0.0;
    double pitch = 0.0;
    std::optional<Point3> position;
    std::optional<Point3> offset_frac; ///< multiplied by the mean scene depth
};

std::vector<TrajectoryPose> parse_trajectory(const nlohmann::json &doc);

struct MovementRow {
    double offset_frac  = 0.0;
    double distance     = 0.0;
    double layered      = 0.0;
    double single_layer = 0.0;
    std::vector<double> layered_by_direction;
    std::vector<double> single_by_direction;
};

inline constexpr std::array<const char *, 4> kMoveDirectionNames{"FL", "FR", "BL", "BR"};

/// Unit horizontal direction of each diagonal move.
std::array<Point3, 4> move_directions();

/// Mean hole fraction over the four diagonal moves and every view of `views`,
/// each view re-centred at the moved position.
std::vector<MovementRow> movement_robustness(const SplatScene &layered, const SplatScene &single_layer,
                                             const CameraRig &views, const std::vector<double> &offsets,
                                             double mean_depth, double alpha_threshold);

nlohmann::json cmd_ingest(const PipelineConfig &config);
void cmd_build(const PipelineConfig &config);
void cmd_train(const PipelineConfig &config);
std::vector<std::filesystem::path> cmd_render(const PipelineConfig &config, const std::filesystem::path &bundle,
                                              const std::filesystem::path &trajectory, const LayerFilter &filter);
nlohmann::json cmd_eval(const PipelineConfig &config, const std::filesystem::path &bundle = {});
std::filesystem::path cmd_export(const PipelineConfig &config, const std::filesystem::path &bundle = {});

} // namespace panolayers
