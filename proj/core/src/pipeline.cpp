// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/pipeline.hpp"

#include "panolayers/adapter.hpp"
#include "panolayers/bundle.hpp"
#include "panolayers/io.hpp"
#include "panolayers/sampling.hpp"
#include "panolayers/ssim.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace panolayers {

namespace {

using nlohmann::json;

void
check_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::Config, where + " must be an object");
    }
    for (const auto &[key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw Error(ErrorCode::Config, "unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void
read_opt(const json &obj, const char *key, T &dst) {
    if (obj.contains(key)) {
        dst = obj.at(key).get<T>();
    }
}

void
read_path(const json &obj, const char *key, const fs::path &base, fs::path &dst) {
    if (obj.contains(key)) {
        const fs::path p = obj.at(key).get<std::string>();
        dst              = (!p.empty() && p.is_relative() && !base.empty()) ? base / p : p;
    }
}

std::string
backend_name(InpaintBackend b) {
    return b == InpaintBackend::Adapter ? "adapter" : "baseline";
}

std::string
parser_name(ParserBackend b) {
    return b == ParserBackend::Adapter ? "adapter" : "rules";
}

LayerAssignment
classify(const PipelineConfig &config, const SegmentMap &seg, const fs::path &image) {
    if (config.parser == ParserBackend::Adapter) {
        AdapterProcess adapter(config.parser_command);
        return request_adapter_assignment(seg, image.string(), adapter);
    }
    const LayerRules rules = config.rules.empty() ? default_layer_rules() : load_rules(config.rules.string());
    return classify_segments(seg, rules);
}

LayerMasks
masks_from_workspace(const PipelineConfig &config, const Workspace &ws) {
    const auto seg = read_segment_map(ws.ingest() / "segments.png", ws.ingest() / "labels.json");
    return build_layer_masks(seg, classify(config, seg, ws.ingest() / "panorama.png"));
}

std::string
pixel_str(int r, int c) {
    return "(" + std::to_string(r) + ", " + std::to_string(c) + ")";
}

LayerIndex
front_layer(const LayerStack &stack) {
    return stack.keep_dynamic ? LayerIndex::Dynamic : LayerIndex::Foreground;
}

} // namespace

CameraRig
RigConfig::build() const {
    CameraIntrinsics intr;
    intr.fov_x  = deg_to_rad(fov_deg);
    intr.fov_y  = deg_to_rad(fov_deg);
    intr.width  = resolution;
    intr.height = resolution;
    std::vector<double> rows;
    for (double p : pitch_deg) {
        rows.push_back(deg_to_rad(p));
    }
    return build_rig(intr, yaw_count, rows, poles);
}

PipelineConfig
PipelineConfig::from_json(const json &doc, const fs::path &base_dir) {
    check_keys(doc,
               {"panorama", "segments", "labels", "rules", "depth", "inpaint_backend", "inpaint_command", "parser",
                "parser_command", "keep_dynamic", "seed", "pano_width", "strict_aspect", "sky_depth_factor", "init",
                "rig", "train", "eval", "out", "export"},
               "config");
    PipelineConfig c;
    try {
        read_path(doc, "panorama", base_dir, c.panorama);
        read_path(doc, "segments", base_dir, c.segments);
        read_path(doc, "labels", base_dir, c.labels);
        read_path(doc, "rules", base_dir, c.rules);
        read_path(doc, "depth", base_dir, c.depth);
        read_path(doc, "out", base_dir, c.out);
        read_path(doc, "export", base_dir, c.export_path);
        if (doc.contains("inpaint_backend")) {
            const auto b = doc.at("inpaint_backend").get<std::string>();
            if (b != "baseline" && b != "adapter") {
                throw Error(ErrorCode::Config, "inpaint_backend must be baseline or adapter");
            }
            c.inpaint_backend = b == "adapter" ? InpaintBackend::Adapter : InpaintBackend::Baseline;
        }
        if (doc.contains("parser")) {
            const auto p = doc.at("parser").get<std::string>();
            if (p != "rules" && p != "adapter") {
                throw Error(ErrorCode::Config, "parser must be rules or adapter");
            }
            c.parser = p == "adapter" ? ParserBackend::Adapter : ParserBackend::Rules;
        }
        read_opt(doc, "inpaint_command", c.inpaint_command);
        read_opt(doc, "parser_command", c.parser_command);
        read_opt(doc, "keep_dynamic", c.keep_dynamic);
        read_opt(doc, "seed", c.seed);
        read_opt(doc, "pano_width", c.pano_width);
        read_opt(doc, "strict_aspect", c.strict_aspect);
        read_opt(doc, "sky_depth_factor", c.sky_depth_factor);
        if (doc.contains("init")) {
            const auto &j = doc.at("init");
            check_keys(j, {"stride", "spread", "opacity"}, "init");
            read_opt(j, "stride", c.init.stride);
            read_opt(j, "spread", c.init.spread);
            read_opt(j, "opacity", c.init.opacity);
        }
        if (doc.contains("rig")) {
            const auto &j = doc.at("rig");
            check_keys(j, {"fov_deg", "resolution", "yaw_count", "pitch_deg", "poles"}, "rig");
            read_opt(j, "fov_deg", c.rig.fov_deg);
            read_opt(j, "resolution", c.rig.resolution);
            read_opt(j, "yaw_count", c.rig.yaw_count);
            read_opt(j, "pitch_deg", c.rig.pitch_deg);
            read_opt(j, "poles", c.rig.poles);
        }
        if (doc.contains("train")) {
            const auto &j = doc.at("train");
            check_keys(j,
                       {"lambda", "iterations", "lr", "position_lr_scale", "beta1", "beta2", "epsilon",
                        "checkpoint_every", "background"},
                       "train");
            read_opt(j, "lambda", c.train.lambda);
            read_opt(j, "position_lr_scale", c.train.position_lr_scale);
            read_opt(j, "beta1", c.train.beta1);
            read_opt(j, "beta2", c.train.beta2);
            read_opt(j, "epsilon", c.train.epsilon);
            read_opt(j, "checkpoint_every", c.train.checkpoint_every);
            if (j.contains("iterations")) {
                const auto &it = j.at("iterations");
                check_keys(it, {"dynamic", "foreground", "background", "sky"}, "train.iterations");
                for (const auto &[key, value] : it.items()) {
                    c.train.iterations[layer_from_json(json(key))] = value.get<int>();
                }
            }
            if (j.contains("lr")) {
                const auto &lr = j.at("lr");
                check_keys(lr, {"position", "rotation", "log_scale", "opacity_logit", "color"}, "train.lr");
                read_opt(lr, "position", c.train.lr.position);
                read_opt(lr, "rotation", c.train.lr.rotation);
                read_opt(lr, "log_scale", c.train.lr.log_scale);
                read_opt(lr, "opacity_logit", c.train.lr.opacity_logit);
                read_opt(lr, "color", c.train.lr.color);
            }
            if (j.contains("background")) {
                const auto bg = j.at("background").get<std::array<double, 3>>();
                c.train.background = {bg[0], bg[1], bg[2]};
            }
        }
        if (doc.contains("eval")) {
            const auto &j = doc.at("eval");
            check_keys(j, {"offsets", "alpha_threshold", "resolution"}, "eval");
            read_opt(j, "offsets", c.eval.offsets);
            read_opt(j, "alpha_threshold", c.eval.alpha_threshold);
            read_opt(j, "resolution", c.eval.resolution);
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Config, e.what());
    }
    return c;
}

json
PipelineConfig::to_json() const {
    json iterations = json::object();
    for (const auto &[layer, n] : train.iterations) {
        iterations[std::string(layer_name(layer))] = n;
    }
    return json{{"panorama", panorama.string()},
                {"segments", segments.string()},
                {"labels", labels.string()},
                {"rules", rules.string()},
                {"depth", depth.string()},
                {"inpaint_backend", backend_name(inpaint_backend)},
                {"inpaint_command", inpaint_command},
                {"parser", parser_name(parser)},
                {"parser_command", parser_command},
                {"keep_dynamic", keep_dynamic},
                {"seed", seed},
                {"pano_width", pano_width},
                {"strict_aspect", strict_aspect},
                {"sky_depth_factor", sky_depth_factor},
                {"init", {{"stride", init.stride}, {"spread", init.spread}, {"opacity", init.opacity}}},
                {"rig",
                 {{"fov_deg", rig.fov_deg},
                  {"resolution", rig.resolution},
                  {"yaw_count", rig.yaw_count},
                  {"pitch_deg", rig.pitch_deg},
                  {"poles", rig.poles}}},
                {"train",
                 {{"lambda", train.lambda},
                  {"iterations", iterations},
                  {"lr",
                   {{"position", train.lr.position},
                    {"rotation", train.lr.rotation},
                    {"log_scale", train.lr.log_scale},
                    {"opacity_logit", train.lr.opacity_logit},
                    {"color", train.lr.color}}},
                  {"position_lr_scale", train.position_lr_scale},
                  {"beta1", train.beta1},
                  {"beta2", train.beta2},
                  {"epsilon", train.epsilon},
                  {"checkpoint_every", train.checkpoint_every},
                  {"background", {train.background.x(), train.background.y(), train.background.z()}}}},
                {"eval",
                 {{"offsets", eval.offsets}, {"alpha_threshold", eval.alpha_threshold}, {"resolution", eval.resolution}}},
                {"out", out.string()},
                {"export", export_path.string()}};
}

void
PipelineConfig::validate() const {
    for (const auto &[name, path] : {std::pair<const char *, const fs::path &>{"panorama", panorama},
                                     {"segments", segments},
                                     {"labels", labels},
                                     {"depth", depth}}) {
        if (path.empty()) {
            throw Error(ErrorCode::Config, std::string("missing input path '") + name + "'");
        }
        if (!fs::exists(path)) {
            throw Error(ErrorCode::Io, std::string(name) + ": " + path.string() + " does not exist");
        }
    }
    if (!rules.empty() && !fs::exists(rules)) {
        throw Error(ErrorCode::Io, "rules: " + rules.string() + " does not exist");
    }
    if (inpaint_backend == InpaintBackend::Adapter && inpaint_command.empty()) {
        throw Error(ErrorCode::Config, "inpaint adapter selected without inpaint_command");
    }
    if (parser == ParserBackend::Adapter && parser_command.empty()) {
        throw Error(ErrorCode::Config, "parser adapter selected without parser_command");
    }
    if (pano_width < 0 || pano_width % 2 != 0) {
        throw Error(ErrorCode::Config, "pano_width must be a non-negative even number");
    }
    if (init.stride < 1 || !(init.spread > 0.0) || !(init.opacity > 0.0 && init.opacity < 1.0)) {
        throw Error(ErrorCode::Config, "init: stride >= 1, spread > 0, opacity in (0, 1)");
    }
    if (!(sky_depth_factor > 1.0)) {
        throw Error(ErrorCode::Config, "sky_depth_factor must exceed 1");
    }
    if (!(eval.alpha_threshold > 0.0 && eval.alpha_threshold <= 1.0)) {
        throw Error(ErrorCode::Config, "eval.alpha_threshold must lie in (0, 1]");
    }
    if (eval.resolution < 0) {
        throw Error(ErrorCode::Config, "eval.resolution must be non-negative");
    }
    train.validate();
}

PipelineConfig
load_config(const fs::path &path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
    }
    return PipelineConfig::from_json(doc, path.parent_path());
}

void
save_stack(const LayerStack &stack, const fs::path &dir) {
    fs::create_directories(dir);
    for (int l = 0; l < kLayerCount; ++l) {
        const auto prefix = "layer_" + std::to_string(l);
        write_mask_png(dir / (prefix + "_mask.png"), stack.layers[l].mask);
        write_rgb_png(dir / (prefix + "_rgb.png"), stack.layers[l].rgb);
        write_pfm(dir / (prefix + "_depth.pfm"), stack.layers[l].depth);
    }
    write_text_atomic(dir / "stack.json", json{{"keep_dynamic", stack.keep_dynamic}}.dump(2) + "\n");
}

LayerStack
load_stack(const fs::path &dir) {
    LayerStack stack;
    try {
        stack.keep_dynamic = json::parse(read_text(dir / "stack.json")).at("keep_dynamic").get<bool>();
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Validation, (dir / "stack.json").string() + ": " + e.what());
    }
    for (int l = 0; l < kLayerCount; ++l) {
        const auto prefix      = "layer_" + std::to_string(l);
        stack.layers[l].mask  = read_mask_png(dir / (prefix + "_mask.png"));
        stack.layers[l].rgb   = read_rgb_image(dir / (prefix + "_rgb.png"));
        stack.layers[l].depth = read_pfm(dir / (prefix + "_depth.pfm"));
    }
    return stack;
}

std::vector<TrajectoryPose>
parse_trajectory(const json &doc) {
    if (!doc.is_array()) {
        throw Error(ErrorCode::Validation, "trajectory must be a JSON array");
    }
    std::vector<TrajectoryPose> poses;
    for (const auto &entry : doc) {
        check_keys(entry, {"yaw", "pitch", "position", "offset_frac"}, "trajectory pose");
        TrajectoryPose p;
        try {
            read_opt(entry, "yaw", p.yaw);
            read_opt(entry, "pitch", p.pitch);
            if (entry.contains("position") && entry.contains("offset_frac")) {
                throw Error(ErrorCode::Validation, "pose has both position and offset_frac");
            }
            if (entry.contains("position")) {
                const auto v = entry.at("position").get<std::array<double, 3>>();
                p.position   = Point3(v[0], v[1], v[2]);
            }
            if (entry.contains("offset_frac")) {
                const auto v  = entry.at("offset_frac").get<std::array<double, 3>>();
                p.offset_frac = Point3(v[0], v[1], v[2]);
            }
        } catch (const json::exception &e) {
            throw Error(ErrorCode::Validation, std::string("trajectory: ") + e.what());
        }
        poses.push_back(p);
    }
    return poses;
}

std::array<Point3, 4>
move_directions() {
    const Point3 forward(1.0, 0.0, 0.0);
    const Point3 left(0.0, 0.0, 1.0);
    return {(forward + left).normalized(), (forward - left).normalized(), (-forward + left).normalized(),
            (-forward - left).normalized()};
}

std::vector<MovementRow>
movement_robustness(const SplatScene &layered, const SplatScene &single_layer, const CameraRig &views,
                    const std::vector<double> &offsets, double mean_depth, double alpha_threshold) {
    const auto dirs           = move_directions();
    const auto layered_splats = gather_splats(layered, all_layers());
    const auto single_splats  = gather_splats(single_layer, all_layers());
    std::vector<MovementRow> rows;
    for (double frac : offsets) {
        MovementRow row;
        row.offset_frac = frac;
        row.distance    = frac * mean_depth;
        for (const auto &dir : dirs) {
            double hl = 0.0, hs = 0.0;
            for (auto view : views.views) {
                view.position = dir * row.distance;
                hl += count_holes(rasterize(layered_splats, view), alpha_threshold);
                hs += count_holes(rasterize(single_splats, view), alpha_threshold);
            }
            const double n = static_cast<double>(std::max<std::size_t>(1, views.views.size()));
            row.layered_by_direction.push_back(hl / n);
            row.single_by_direction.push_back(hs / n);
        }
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            row.layered += row.layered_by_direction[d] / dirs.size();
            row.single_layer += row.single_by_direction[d] / dirs.size();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json
cmd_ingest(const PipelineConfig &config) {
    config.validate();
    const Workspace ws{config.out};
    fs::create_directories(ws.ingest());
    json report;
    json warnings = json::array();

    Panorama pano = read_rgb_image(config.panorama);
    const int in_w = pano.width(), in_h = pano.height();
    report["panorama"] = {{"path", config.panorama.string()}, {"input_size", {in_w, in_h}}};
    if (in_w != 2 * in_h) {
        const std::string msg = config.panorama.string() + ": aspect " + std::to_string(in_w) + "x" +
                                std::to_string(in_h) + " is not 2:1";
        if (config.strict_aspect || config.pano_width == 0) {
            throw Error(ErrorCode::DimensionMismatch, msg);
        }
        spdlog::warn("{}", msg);
        warnings.push_back(msg);
    }
    const int out_w = config.pano_width == 0 ? in_w : config.pano_width;
    const int out_h = config.pano_width == 0 ? in_h : config.pano_width / 2;
    if (out_w != in_w || out_h != in_h) {
        const std::string msg = "panorama resampled from " + std::to_string(in_w) + "x" + std::to_string(in_h) +
                                " to " + std::to_string(out_w) + "x" + std::to_string(out_h);
        spdlog::warn("{}", msg);
        warnings.push_back(msg);
        pano = resize_bilinear(pano, out_w, out_h);
    }
    report["panorama"]["output_size"] = {out_w, out_h};

    SegmentMap seg = read_segment_map(config.segments, config.labels);
    if (seg.label_image.width() != 2 * seg.label_image.height()) {
        throw Error(ErrorCode::DimensionMismatch, config.segments.string() + ": segment map is not 2:1");
    }
    if (!seg.label_image.same_dims(out_w, out_h)) {
        seg.label_image = resize_nearest(seg.label_image, out_w, out_h);
    }
    seg.validate();

    DepthMap depth = read_depth(config.depth);
    if (depth.width() != 2 * depth.height()) {
        throw Error(ErrorCode::DimensionMismatch, config.depth.string() + ": depth map is not 2:1");
    }
    for (int r = 0; r < depth.height(); ++r) {
        for (int c = 0; c < depth.width(); ++c) {
            const float d = depth(r, c);
            if (std::isnan(d) || d < 0.0f || std::isinf(d)) {
                throw Error(ErrorCode::InvalidDepth, config.depth.string() + ": invalid depth " + std::to_string(d) +
                                                         " at pixel " + pixel_str(r, c));
            }
        }
    }
    if (!depth.same_dims(out_w, out_h)) {
        depth = resize_nearest(depth, out_w, out_h);
    }

    write_rgb_png(ws.ingest() / "panorama.png", pano);
    write_label_png(ws.ingest() / "segments.png", seg.label_image);
    json labels = json::object();
    for (const auto &[id, name] : seg.labels) {
        labels[std::to_string(id)] = name;
    }
    write_text_atomic(ws.ingest() / "labels.json", labels.dump(2) + "\n");
    write_pfm(ws.ingest() / "depth.pfm", depth);

    const auto masks = build_layer_masks(seg, classify(config, seg, ws.ingest() / "panorama.png"));
    std::size_t covered = 0;
    json layer_counts   = json::object();
    for (auto l : kAllLayers) {
        const auto n                                 = count_set(masks[to_int(l)]);
        layer_counts[std::string(layer_name(l))] = n;
        covered += n;
    }
    if (covered != pano.size()) {
        throw Error(ErrorCode::Validation, "layer masks do not partition the panorama");
    }
    std::size_t missing = 0;
    double dmin = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < depth.size(); ++i) {
        if (depth[i] > 0.0f) {
            dmin = (dmax == 0.0) ? depth[i] : std::min<double>(dmin, depth[i]);
            dmax = std::max<double>(dmax, depth[i]);
        } else if (!masks[to_int(LayerIndex::Sky)][i]) {
            ++missing;
        }
    }
    report["layers"]    = layer_counts;
    report["labels"]    = seg.labels.size();
    report["depth"]     = {{"path", config.depth.string()}, {"min", dmin}, {"max", dmax}, {"missing_non_sky", missing}};
    report["warnings"]  = warnings;
    report["valid"]     = true;
    write_text_atomic(ws.ingest() / "report.json", report.dump(2) + "\n");
    return report;
}

void
cmd_build(const PipelineConfig &config) {
    const Workspace ws{config.out};
    if (!fs::exists(ws.ingest() / "report.json")) {
        throw Error(ErrorCode::Io, "no ingested workspace at " + ws.ingest().string() + "; run ingest first");
    }
    fs::create_directories(ws.build());
    const Panorama pano = read_rgb_image(ws.ingest() / "panorama.png");
    const DepthMap depth = read_pfm(ws.ingest() / "depth.pfm");

    LayerMasks masks;
    try {
        masks = masks_from_workspace(config, ws);
    } catch (const Error &e) {
        throw Error(e.code(), std::string("layer parsing: ") + e.what());
    }

    StackOptions options;
    options.keep_dynamic                 = config.keep_dynamic;
    options.sky_depth_factor             = config.sky_depth_factor;
    options.inpaint.backend              = config.inpaint_backend;
    options.inpaint.adapter.command      = config.inpaint_command;
    options.inpaint.adapter.work_dir     = ws.build() / "inpaint_work";
    LayerStack stack;
    try {
        stack = build_layer_stack(pano, masks, depth, options);
    } catch (const Error &e) {
        throw Error(e.code(), std::string("layer recovery: ") + e.what());
    }
    save_stack(stack, ws.build());
    stack = load_stack(ws.build());

    try {
        const auto cloud = lift_stack_points(stack, config.init.stride);
        for (const auto &[layer, points] : cloud) {
            write_point_cloud_ply(ws.build() / ("layer_" + std::to_string(to_int(layer)) + ".ply"),
                                  {{layer, points}});
        }
        write_point_cloud_ply(ws.build() / "scene.ply", cloud);
        export_bundle(init_scene(cloud, stack.dims(), config.init), ws.init_bundle());
    } catch (const Error &e) {
        throw Error(e.code(), std::string("lift: ") + e.what());
    }
}

void
cmd_train(const PipelineConfig &config) {
    const Workspace ws{config.out};
    const LayerStack stack = load_stack(ws.build());
    SplatScene scene       = load_bundle(ws.init_bundle());
    TrainConfig train      = config.train;
    train.seed             = config.seed;
    train.resolution       = config.rig.resolution;
    RigConfig rig_config   = config.rig;
    const CameraRig rig    = select_parity(rig_config.build(), 0);
    fs::create_directories(ws.train());

    std::string log;
    TrainHooks hooks;
    hooks.on_step = [&](const TrainRecord &r) {
        log += json(r).dump();
        log.push_back('\n');
    };
    hooks.on_checkpoint = [&](const SplatScene &s, LayerIndex layer, int iter) {
        export_bundle(s, ws.train() / "checkpoint");
        spdlog::info("checkpoint: layer {} iteration {}", to_int(layer), iter);
    };
    try {
        train_scene(scene, stack, rig, train, hooks);
    } catch (...) {
        write_text_atomic(ws.train() / "train_log.ndjson", log);
        throw;
    }
    write_text_atomic(ws.train() / "train_log.ndjson", log);
    export_bundle(scene, ws.trained_bundle());
}

std::vector<fs::path>
cmd_render(const PipelineConfig &config, const fs::path &bundle, const fs::path &trajectory,
           const LayerFilter &filter) {
    const Workspace ws{config.out};
    const SplatScene scene = load_bundle(bundle.empty() ? ws.trained_bundle() : bundle);
    std::vector<TrajectoryPose> poses;
    try {
        poses = parse_trajectory(json::parse(read_text(trajectory)));
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Validation, trajectory.string() + ": " + e.what());
    }
    std::optional<double> mean_depth;
    CameraIntrinsics intr;
    intr.fov_x = intr.fov_y = deg_to_rad(config.rig.fov_deg);
    intr.width = intr.height = config.rig.resolution;
    fs::create_directories(ws.render());
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        CameraView view;
        view.intrinsics = intr;
        view.yaw        = poses[i].yaw;
        view.pitch      = poses[i].pitch;
        if (poses[i].position) {
            view.position = *poses[i].position;
        } else if (poses[i].offset_frac) {
            if (!mean_depth) {
                mean_depth = mean_scene_depth(scene);
            }
            view.position = *poses[i].offset_frac * *mean_depth;
        }
        const auto frame = render_scene(scene, view, filter, {config.train.background});
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu", i);
        const fs::path color = ws.render() / (std::string(name) + ".png");
        write_rgb_png(color, frame.color);
        write_gray_png(ws.render() / (std::string(name) + "_alpha.png"), frame.alpha);
        written.push_back(color);
    }
    return written;
}

json
cmd_eval(const PipelineConfig &config, const fs::path &bundle) {
    const Workspace ws{config.out};
    const LayerStack stack = load_stack(ws.build());
    const fs::path bundle_dir =
        !bundle.empty() ? bundle : (fs::exists(ws.trained_bundle()) ? ws.trained_bundle() : ws.init_bundle());
    const SplatScene scene = load_bundle(bundle_dir);
    RigConfig eval_rig = config.rig;
    if (config.eval.resolution > 0) {
        eval_rig.resolution = config.eval.resolution;
    }
    const CameraRig held_out = select_parity(eval_rig.build(), 1);
    const Panorama &gt_pano = stack[front_layer(stack)].rgb;

    json views    = json::array();
    double sum_p  = 0.0, sum_s = 0.0;
    const RasterSettings settings{config.train.background};
    const auto splats = gather_splats(scene, all_layers());
    for (std::size_t i = 0; i < held_out.views.size(); ++i) {
        const auto &view = held_out.views[i];
        const auto gt    = to_color_image(sample_perspective(gt_pano, view));
        const auto frame = rasterize(splats, view, settings);
        const double p   = psnr(frame.color, gt);
        const double s   = ssim(frame.color, gt);
        sum_p += p;
        sum_s += s;
        views.push_back({{"rig_index", 2 * i + 1}, {"yaw", view.yaw}, {"pitch", view.pitch}, {"psnr", p}, {"ssim", s}});
    }
    const double n = static_cast<double>(std::max<std::size_t>(1, held_out.views.size()));

    const double mean_depth  = mean_scene_depth(scene);
    const SplatScene single  = init_single_layer_scene(stack, config.init);
    const auto rows = movement_robustness(scene, single, held_out, config.eval.offsets, mean_depth,
                                          config.eval.alpha_threshold);
    json table = json::array();
    for (const auto &row : rows) {
        json by_dir = json::object();
        for (std::size_t d = 0; d < kMoveDirectionNames.size(); ++d) {
            by_dir[kMoveDirectionNames[d]] = {{"layered", row.layered_by_direction[d]},
                                              {"single_layer", row.single_by_direction[d]}};
        }
        table.push_back({{"offset", row.offset_frac},
                         {"distance_m", row.distance},
                         {"layered_hole_fraction", row.layered},
                         {"single_layer_hole_fraction", row.single_layer},
                         {"directions", by_dir}});
    }

    json report;
    report["bundle"]    = bundle_dir.string();
    report["resolution"] = held_out.views.empty() ? 0 : held_out.views.front().intrinsics.width;
    report["views"]     = views;
    report["mean_psnr"] = sum_p / n;
    report["mean_ssim"] = sum_s / n;
    report["movement"]  = {{"mean_scene_depth", mean_depth},
                          {"alpha_threshold", config.eval.alpha_threshold},
                          {"offsets", config.eval.offsets},
                          {"rows", table}};
    fs::create_directories(ws.eval());
    write_text_atomic(ws.eval() / "metrics.json", report.dump(2) + "\n");
    return report;
}

fs::path
cmd_export(const PipelineConfig &config, const fs::path &bundle) {
    const Workspace ws{config.out};
    const SplatScene scene = load_bundle(bundle.empty() ? ws.trained_bundle() : bundle);
    const fs::path target  = config.export_path.empty() ? ws.root / "export" : config.export_path;
    export_bundle(scene, target);
    return target;
}

} // namespace panolayers
