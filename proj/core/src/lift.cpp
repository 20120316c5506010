// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/lift.hpp"

#include "panolayers/io.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace panolayers {

LayerPoints
pano_to_points(const Panorama &layer_rgb, const DepthMap &layer_depth, const Mask &mask, int stride) {
    require_same_dims(layer_rgb, layer_depth, "layer depth");
    require_same_dims(layer_rgb, mask, "layer mask");
    if (stride < 1) {
        throw Error(ErrorCode::Config, "stride must be >= 1");
    }
    const PanoDims dims{layer_rgb.height(), layer_rgb.width()};
    LayerPoints points;
    std::vector<std::string> missing;
    std::size_t missing_count = 0;
    for (int r = 0; r < dims.height; r += stride) {
        for (int c = 0; c < dims.width; c += stride) {
            if (!mask(r, c)) {
                continue;
            }
            const float d = layer_depth(r, c);
            if (!(d > 0.0f) || !std::isfinite(d)) {
                if (missing.size() < 16) {
                    missing.push_back("(" + std::to_string(r) + ", " + std::to_string(c) + ")");
                }
                ++missing_count;
                continue;
            }
            points.push_back({unproject(r, c, d, dims), layer_rgb(r, c), r, c});
        }
    }
    if (missing_count > 0) {
        std::string list;
        for (const auto &m : missing) {
            list += " " + m;
        }
        throw Error(ErrorCode::MissingDepth,
                    std::to_string(missing_count) + " masked pixels have no depth:" + list + (missing_count > missing.size() ? " ..." : ""));
    }
    return points;
}

std::vector<Splat>
points_to_splats(const LayerPoints &points, int pano_width, const InitConfig &init) {
    const double footprint = 2.0 * kPi / pano_width * init.stride * init.spread;
    const double opacity   = logit(init.opacity);
    std::vector<Splat> splats;
    splats.reserve(points.size());
    for (const auto &p : points) {
        Splat s;
        s.position      = p.position;
        s.rotation      = {1.0, 0.0, 0.0, 0.0};
        s.log_scale     = Eigen::Vector3d::Constant(std::log(p.position.norm() * footprint));
        s.opacity_logit = opacity;
        s.color         = p.color.cast<double>();
        splats.push_back(s);
    }
    return splats;
}

LayeredPointCloud
lift_stack_points(const LayerStack &stack, int stride) {
    LayeredPointCloud cloud;
    for (auto l : stack.present_layers()) {
        cloud[l] = pano_to_points(stack[l].rgb, stack[l].depth, stack.extent(l), stride);
    }
    return cloud;
}

SplatScene
init_scene(const LayeredPointCloud &cloud, PanoDims dims, const InitConfig &init) {
    SplatScene scene;
    scene.pano = dims;
    for (const auto &[layer, points] : cloud) {
        scene.layers[layer] = points.empty() ? std::vector<Splat>{} : points_to_splats(points, dims.width, init);
    }
    return scene;
}

SplatScene
init_single_layer_scene(const LayerStack &stack, const InitConfig &init) {
    const auto dims = stack.dims();
    const LayerIndex front = stack.keep_dynamic ? LayerIndex::Dynamic : LayerIndex::Foreground;
    Panorama rgb           = stack[front].rgb;
    DepthMap depth(dims.width, dims.height, 0.0f);
    Mask all(dims.width, dims.height, 1);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        for (int k = 0; k < kLayerCount; ++k) {
            if (stack.layers[k].mask[i]) {
                // Without a kept dynamic layer its pixels show the surface recovered behind it.
                const int source = (k == 0 && !stack.keep_dynamic) ? 1 : k;
                depth[i]         = stack.layers[source].depth[i];
                break;
            }
        }
    }
    SplatScene scene;
    scene.pano                          = dims;
    scene.layers[LayerIndex::Background] = points_to_splats(pano_to_points(rgb, depth, all, init.stride), dims.width, init);
    return scene;
}

void
write_point_cloud_ply(const std::filesystem::path &path, const LayeredPointCloud &cloud) {
    std::size_t total = 0;
    for (const auto &[_, pts] : cloud) {
        total += pts.size();
    }
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\nelement vertex " << total
           << "\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nproperty uchar green\n"
              "property uchar blue\nproperty uchar layer\nend_header\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> bytes(h.begin(), h.end());
    const auto put_f32 = [&](float v) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int k = 0; k < 4; ++k) {
            bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
        }
    };
    const auto to_u8 = [](float v) {
        return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    };
    for (const auto &[layer, pts] : cloud) {
        for (const auto &p : pts) {
            put_f32(static_cast<float>(p.position.x()));
            put_f32(static_cast<float>(p.position.y()));
            put_f32(static_cast<float>(p.position.z()));
            bytes.push_back(to_u8(p.color.x()));
            bytes.push_back(to_u8(p.color.y()));
            bytes.push_back(to_u8(p.color.z()));
            bytes.push_back(static_cast<std::uint8_t>(to_int(layer)));
        }
    }
    write_bytes_atomic(path, bytes);
}

} // namespace panolayers
