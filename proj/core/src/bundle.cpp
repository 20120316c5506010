// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/bundle.hpp"

#include "panolayers/io.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>

namespace panolayers {

std::string
sha256_hex(std::span<const std::uint8_t> bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Internal, "SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t>
encode_layer(const std::vector<Splat> &splats) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(splats.size() * kBundleRecordBytes);
    const auto put = [&](double v) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int k = 0; k < 4; ++k) {
            bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
        }
    };
    for (const auto &s : splats) {
        for (int i = 0; i < 3; ++i) {
            put(s.position(i));
        }
        for (int i = 0; i < 4; ++i) {
            put(s.rotation(i));
        }
        const Eigen::Vector3d scale = s.scale();
        for (int i = 0; i < 3; ++i) {
            put(scale(i));
        }
        put(s.opacity());
        for (int i = 0; i < 3; ++i) {
            put(s.color(i));
        }
    }
    return bytes;
}

std::vector<Splat>
decode_layer(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % kBundleRecordBytes != 0) {
        throw Error(ErrorCode::Validation, "layer payload is not a whole number of records");
    }
    std::vector<Splat> splats(bytes.size() / kBundleRecordBytes);
    std::size_t pos = 0;
    const auto get  = [&]() {
        std::uint32_t bits = 0;
        for (int k = 0; k < 4; ++k) {
            bits |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * k);
        }
        return static_cast<double>(std::bit_cast<float>(bits));
    };
    for (auto &s : splats) {
        for (int i = 0; i < 3; ++i) {
            s.position(i) = get();
        }
        for (int i = 0; i < 4; ++i) {
            s.rotation(i) = get();
        }
        for (int i = 0; i < 3; ++i) {
            s.log_scale(i) = std::log(get());
        }
        s.opacity_logit = logit(get());
        for (int i = 0; i < 3; ++i) {
            s.color(i) = get();
        }
    }
    return splats;
}

std::string
layer_file_name(LayerIndex layer) {
    return "layer_" + std::to_string(to_int(layer)) + ".bin";
}

void
export_bundle(const SplatScene &scene, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["version"] = kBundleVersion;
    manifest["pano"]    = {{"width", scene.pano.width}, {"height", scene.pano.height}};
    manifest["units"]   = scene.units;
    manifest["layers"]  = nlohmann::ordered_json::array();
    for (const auto &[layer, splats] : scene.layers) {
        const auto bytes = encode_layer(splats);
        const auto file  = layer_file_name(layer);
        write_bytes_atomic(dir / file, bytes);
        manifest["layers"].push_back({{"index", to_int(layer)},
                                      {"name", layer_name(layer)},
                                      {"count", splats.size()},
                                      {"file", file},
                                      {"sha256", sha256_hex(bytes)}});
    }
    write_text_atomic(dir / kManifestName, manifest.dump(2) + "\n");
}

SplatScene
load_bundle(const std::filesystem::path &dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text(dir / kManifestName));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Validation, "malformed bundle manifest: " + std::string(e.what()));
    }
    try {
        if (manifest.at("version").get<int>() != kBundleVersion) {
            throw Error(ErrorCode::Version, "bundle version " + manifest.at("version").dump() + ", expected " +
                                                std::to_string(kBundleVersion));
        }
        SplatScene scene;
        scene.pano  = {manifest.at("pano").at("height").get<int>(), manifest.at("pano").at("width").get<int>()};
        scene.units = manifest.value("units", std::string("meters"));
        for (const auto &entry : manifest.at("layers")) {
            const auto layer = layer_from_json(entry.at("index"));
            const auto file  = entry.at("file").get<std::string>();
            const auto bytes = read_bytes(dir / file);
            if (sha256_hex(bytes) != entry.at("sha256").get<std::string>()) {
                throw Error(ErrorCode::Checksum, file);
            }
            auto splats = decode_layer(bytes);
            if (splats.size() != entry.at("count").get<std::size_t>()) {
                throw Error(ErrorCode::Validation, file + ": record count differs from manifest");
            }
            scene.layers[layer] = std::move(splats);
        }
        return scene;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Validation, "malformed bundle manifest: " + std::string(e.what()));
    }
}

} // namespace panolayers
