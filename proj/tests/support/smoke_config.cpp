// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "smoke_config.hpp"

#include "synthetic_scene.hpp"

namespace panolayers::testsupport {

PipelineConfig
smoke_config(const std::filesystem::path &out) {
    PipelineConfig c;
    const auto data = fixture_dir();
    c.panorama      = data / "panorama.png";
    c.segments      = data / "segments.png";
    c.labels        = data / "labels.json";
    c.depth         = data / "depth.pfm";
    c.pano_width    = 0;
    c.seed          = 1;
    c.init.stride   = 2;
    c.rig.resolution = 64;
    c.train.iterations = {{LayerIndex::Sky, 150},
                          {LayerIndex::Background, 200},
                          {LayerIndex::Foreground, 150},
                          {LayerIndex::Dynamic, 150}};
    c.out = out;
    return c;
}

nlohmann::json
run_pipeline(const PipelineConfig &config) {
    cmd_ingest(config);
    cmd_build(config);
    cmd_train(config);
    auto report = cmd_eval(config);
    cmd_export(config);
    return report;
}

} // namespace panolayers::testsupport
