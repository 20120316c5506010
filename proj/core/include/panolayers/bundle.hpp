// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/splat.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace panolayers {

inline constexpr int kBundleVersion       = 1;
inline constexpr int kBundleRecordFloats  = 14;
inline constexpr int kBundleRecordBytes   = kBundleRecordFloats * 4;
inline constexpr const char *kManifestName = "manifest.json";

std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Little-endian float32 records: position, quaternion (w, x, y, z), linear
/// scale, linear opacity, rgb.
std::vector<std::uint8_t> encode_layer(const std::vector<Splat> &splats);
std::vector<Splat> decode_layer(std::span<const std::uint8_t> bytes);

std::string layer_file_name(LayerIndex layer);

/// Writes one binary per layer of the scene (empty layers included), then
/// the manifest.
void export_bundle(const SplatScene &scene, const std::filesystem::path &dir);

/// Throws Checksum or Version on a damaged or foreign bundle.
SplatScene load_bundle(const std::filesystem::path &dir);

} // namespace panolayers
