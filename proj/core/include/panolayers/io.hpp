// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/image.hpp"
#include "panolayers/layer_parsing.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace panolayers {

namespace fs = std::filesystem;

/// 8/16-bit PNG or JPEG, gray or color, as RGB in [0,1].
Panorama read_rgb_image(const fs::path &path);
/// 8-bit RGB PNG; values are clamped and rounded.
void write_rgb_png(const fs::path &path, const Panorama &img);
void write_rgb_png(const fs::path &path, const ColorImage &img);

Mask read_mask_png(const fs::path &path);
void write_mask_png(const fs::path &path, const Mask &mask);
/// Grayscale PNG of a [0,1] scalar image (alpha maps and the like).
void write_gray_png(const fs::path &path, const Image<double> &img);

/// Single-channel 8- or 16-bit PNG of instance ids.
LabelImage read_label_png(const fs::path &path);
void write_label_png(const fs::path &path, const LabelImage &labels);

/// {"<id>": "<label>", ...}
std::map<int, std::string> read_label_json(const fs::path &path);
SegmentMap read_segment_map(const fs::path &png, const fs::path &labels_json);

/// Little-endian single-channel PFM ("Pf"), rows stored bottom-up.
DepthMap read_pfm(const fs::path &path);
void write_pfm(const fs::path &path, const DepthMap &depth);

/// .pfm, or 16-bit .png with a JSON sidecar {"scale_m_per_unit": s} next to it
/// (same stem with .json, or <file>.json).
DepthMap read_depth(const fs::path &path);

Panorama resize_bilinear(const Panorama &img, int width, int height);
LabelImage resize_nearest(const LabelImage &img, int width, int height);
DepthMap resize_nearest(const DepthMap &img, int width, int height);

/// Writes through a temporary sibling and renames it into place.
void write_bytes_atomic(const fs::path &path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const fs::path &path, const std::string &text);
std::string read_text(const fs::path &path);
std::vector<std::uint8_t> read_bytes(const fs::path &path);

} // namespace panolayers
