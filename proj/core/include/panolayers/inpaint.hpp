// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace panolayers {

enum class InpaintBackend { Baseline, Adapter };

/// External inpainting tool. The engine writes input.png, mask.png (255 =
/// fill) and prompt.txt into `work_dir`, runs `command` there (the token
/// "{workdir}" in any argument is replaced by the directory path) and reads
/// back output.png.
struct InpaintAdapterConfig {
    std::vector<std::string> command;
    std::filesystem::path work_dir = "inpaint_work";
    std::string prompt             = "no objects present";
};

struct InpaintOptions {
    InpaintBackend backend = InpaintBackend::Baseline;
    InpaintAdapterConfig adapter;
};

/// Seam-aware multiscale push-pull fill of `hole` (weights 0 inside, 1
/// outside; longitude wraps at every level). Pixels outside the hole are
/// returned bit-for-bit. Throws DegenerateHole when the hole covers the image.
template <int N>
Image<Eigen::Matrix<float, N, 1>> push_pull_fill(const Image<Eigen::Matrix<float, N, 1>> &image, const Mask &hole);

Panorama inpaint_rgb(const Panorama &image, const Mask &hole, const InpaintOptions &options = {});

/// Removes a nearer layer by inpainting its mask: the result is the next
/// deeper complete panorama.
Panorama remove_layer(const Panorama &current, const Mask &layer_mask, const InpaintOptions &options = {});

} // namespace panolayers
