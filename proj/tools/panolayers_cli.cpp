// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/pipeline.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

namespace {

using namespace panolayers;

LayerFilter
parse_filter(const std::string &text) {
    if (text.empty() || text == "all") {
        return all_layers();
    }
    LayerFilter filter;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const bool numeric = !item.empty() && std::all_of(item.begin(), item.end(), ::isdigit);
        filter.push_back(numeric ? layer_from_json(std::stoi(item)) : layer_from_json(item));
    }
    return filter;
}

struct GlobalFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool keep_dynamic = false;
    std::string inpaint;
    std::string parser;
    std::optional<int> stride;
    std::string out;
};

PipelineConfig
resolve(const GlobalFlags &flags) {
    if (flags.config.empty()) {
        throw Error(ErrorCode::Config, "--config is required");
    }
    PipelineConfig config = load_config(flags.config);
    if (flags.seed) {
        config.seed = *flags.seed;
    }
    if (flags.keep_dynamic) {
        config.keep_dynamic = true;
    }
    if (!flags.inpaint.empty()) {
        config.inpaint_backend = flags.inpaint == "adapter" ? InpaintBackend::Adapter : InpaintBackend::Baseline;
    }
    if (!flags.parser.empty()) {
        config.parser = flags.parser == "adapter" ? ParserBackend::Adapter : ParserBackend::Rules;
    }
    if (flags.stride) {
        config.init.stride = *flags.stride;
    }
    if (!flags.out.empty()) {
        config.out = flags.out;
    }
    return config;
}

} // namespace

int
main(int argc, char **argv) {
    CLI::App app{"Layered panorama to Gaussian-splat scene builder"};
    app.require_subcommand(1);
    GlobalFlags flags;
    app.add_option("--config", flags.config, "pipeline configuration (JSON)");
    app.add_option("--seed", flags.seed, "random seed");
    app.add_flag("--keep-dynamic", flags.keep_dynamic, "keep the dynamic layer as its own splat layer");
    app.add_option("--backend-inpaint", flags.inpaint, "inpainting backend")->check(CLI::IsMember({"baseline", "adapter"}));
    app.add_option("--parser", flags.parser, "layer parser backend")->check(CLI::IsMember({"rules", "adapter"}));
    app.add_option("--stride", flags.stride, "pixel stride when lifting layers")->check(CLI::PositiveNumber);
    app.add_option("--out", flags.out, "workspace directory");

    auto *ingest = app.add_subcommand("ingest", "load and validate inputs");
    auto *build  = app.add_subcommand("build", "parse layers, recover occluded content, lift to splats");
    auto *train  = app.add_subcommand("train", "optimize layers back to front");
    auto *render = app.add_subcommand("render", "render a trajectory from a bundle");
    auto *eval   = app.add_subcommand("eval", "held-out PSNR/SSIM and movement robustness");
    auto *exp    = app.add_subcommand("export", "write the scene bundle");

    std::string bundle, trajectory, layers = "all";
    render->add_option("--bundle", bundle, "bundle directory (default: trained bundle)");
    render->add_option("--trajectory", trajectory, "trajectory JSON")->required();
    render->add_option("--layers", layers, "comma-separated layer indices or names, or 'all'");
    eval->add_option("--bundle", bundle, "bundle directory (default: trained bundle)");
    exp->add_option("--bundle", bundle, "bundle directory (default: trained bundle)");

    for (auto *sub : {ingest, build, train, render, eval, exp}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const PipelineConfig config = resolve(flags);
        if (*ingest) {
            const auto report = cmd_ingest(config);
            std::cout << report.dump(2) << "\n";
        } else if (*build) {
            cmd_build(config);
        } else if (*train) {
            cmd_train(config);
        } else if (*render) {
            for (const auto &frame : cmd_render(config, bundle, trajectory, parse_filter(layers))) {
                std::cout << frame.string() << "\n";
            }
        } else if (*eval) {
            const auto report = cmd_eval(config, bundle);
            std::cout << report.dump(2) << "\n";
        } else if (*exp) {
            std::cout << cmd_export(config, bundle).string() << "\n";
        }
    } catch (const Error &e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
