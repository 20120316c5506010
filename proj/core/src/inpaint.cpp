// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/inpaint.hpp"

#include "panolayers/io.hpp"

#include <algorithm>
#include <cmath>
#include <sys/wait.h>
#include <unistd.h>

namespace panolayers {
namespace {

template <typename V>
struct Level {
    Image<V> color;
    Image<float> weight;
};

template <typename V>
bool
has_empty_pixel(const Level<V> &level) {
    return std::any_of(level.weight.pixels().begin(), level.weight.pixels().end(), [](float w) { return w <= 0.0f; });
}

/// 2x2 weighted average. Columns wrap (odd widths pair the last column with
/// column 0); rows clamp.
template <typename V>
Level<V>
push(const Level<V> &fine) {
    const int w = (fine.color.width() + 1) / 2;
    const int h = (fine.color.height() + 1) / 2;
    Level<V> coarse{Image<V>(w, h, V::Zero()), Image<float>(w, h, 0.0f)};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            V sum      = V::Zero();
            float wsum = 0.0f;
            for (int dr = 0; dr < 2; ++dr) {
                const int fr = 2 * r + dr;
                if (fr >= fine.color.height()) {
                    continue;
                }
                for (int dc = 0; dc < 2; ++dc) {
                    const int fc  = (2 * c + dc) % fine.color.width();
                    const float k = fine.weight(fr, fc);
                    sum += k * fine.color(fr, fc);
                    wsum += k;
                }
            }
            if (wsum > 0.0f) {
                coarse.color(r, c) = sum / wsum;
            }
            coarse.weight(r, c) = std::min(1.0f, wsum);
        }
    }
    return coarse;
}

/// Bilinear lookup of the coarse level at the fine pixel's center.
template <typename V>
V
upsample_at(const Image<V> &coarse, int fine_row, int fine_col) {
    const double y = (fine_row + 0.5) / 2.0 - 0.5;
    const double x = (fine_col + 0.5) / 2.0 - 0.5;
    const int y0   = static_cast<int>(std::floor(y));
    const int x0   = static_cast<int>(std::floor(x));
    const float fy = static_cast<float>(y - y0);
    const float fx = static_cast<float>(x - x0);
    const int w    = coarse.width();
    const int h    = coarse.height();
    const auto row = [h](int r) { return std::clamp(r, 0, h - 1); };
    const auto col = [w](int c) { return ((c % w) + w) % w; };
    const V top    = coarse(row(y0), col(x0)) * (1.0f - fx) + coarse(row(y0), col(x0 + 1)) * fx;
    const V bottom = coarse(row(y0 + 1), col(x0)) * (1.0f - fx) + coarse(row(y0 + 1), col(x0 + 1)) * fx;
    return top * (1.0f - fy) + bottom * fy;
}

Panorama
inpaint_with_adapter(const Panorama &image, const Mask &hole, const InpaintAdapterConfig &cfg) {
    if (cfg.command.empty()) {
        throw Error(ErrorCode::Config, "inpainting adapter command is not configured");
    }
    const fs::path dir = fs::absolute(cfg.work_dir);
    fs::create_directories(dir);
    write_rgb_png(dir / "input.png", image);
    write_mask_png(dir / "mask.png", hole);
    write_text_atomic(dir / "prompt.txt", cfg.prompt + "\n");
    fs::remove(dir / "output.png");

    std::vector<std::string> argv;
    for (std::string arg : cfg.command) {
        for (auto pos = arg.find("{workdir}"); pos != std::string::npos; pos = arg.find("{workdir}")) {
            arg.replace(pos, 9, dir.string());
        }
        argv.push_back(std::move(arg));
    }
    std::vector<char *> args;
    for (auto &a : argv) {
        args.push_back(a.data());
    }
    args.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw Error(ErrorCode::Io, "fork failed for inpainting adapter");
    }
    if (pid == 0) {
        if (::chdir(dir.c_str()) != 0) {
            ::_exit(126);
        }
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        throw Error(ErrorCode::AdapterProtocol,
                    "inpainting adapter exited with status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    }
    const Panorama filled = read_rgb_image(dir / "output.png");
    if (!filled.same_dims(image)) {
        throw Error(ErrorCode::AdapterProtocol, "inpainting adapter returned an image of the wrong size");
    }
    Panorama out = image;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (hole[i]) {
            out[i] = filled[i];
        }
    }
    return out;
}

} // namespace

template <int N>
Image<Eigen::Matrix<float, N, 1>>
push_pull_fill(const Image<Eigen::Matrix<float, N, 1>> &image, const Mask &hole) {
    using V = Eigen::Matrix<float, N, 1>;
    require_same_dims(image, hole, "inpaint hole");
    const std::size_t holes = count_set(hole);
    if (holes == 0) {
        return image;
    }
    if (holes == hole.size()) {
        throw Error(ErrorCode::DegenerateHole, "the hole covers the whole image");
    }

    std::vector<Level<V>> pyramid;
    pyramid.push_back({image, Image<float>(image.width(), image.height(), 1.0f)});
    for (std::size_t i = 0; i < hole.size(); ++i) {
        if (hole[i]) {
            pyramid[0].weight[i] = 0.0f;
            pyramid[0].color[i]  = V::Zero();
        }
    }
    while (has_empty_pixel(pyramid.back())) {
        pyramid.push_back(push(pyramid.back()));
    }

    for (int k = static_cast<int>(pyramid.size()) - 2; k >= 0; --k) {
        const Image<V> &coarse = pyramid[k + 1].color;
        Level<V> &fine         = pyramid[k];
        for (int r = 0; r < fine.color.height(); ++r) {
            for (int c = 0; c < fine.color.width(); ++c) {
                const float w = fine.weight(r, c);
                if (w >= 1.0f) {
                    continue;
                }
                fine.color(r, c) = w * fine.color(r, c) + (1.0f - w) * upsample_at(coarse, r, c);
            }
        }
    }

    Image<V> out = image;
    for (std::size_t i = 0; i < hole.size(); ++i) {
        if (hole[i]) {
            out[i] = pyramid[0].color[i];
        }
    }
    return out;
}

template Image<Eigen::Matrix<float, 1, 1>> push_pull_fill<1>(const Image<Eigen::Matrix<float, 1, 1>> &, const Mask &);
template Image<Eigen::Matrix<float, 3, 1>> push_pull_fill<3>(const Image<Eigen::Matrix<float, 3, 1>> &, const Mask &);

Panorama
inpaint_rgb(const Panorama &image, const Mask &hole, const InpaintOptions &options) {
    require_same_dims(image, hole, "inpaint hole");
    if (count_set(hole) == 0) {
        return image;
    }
    if (options.backend == InpaintBackend::Adapter) {
        return inpaint_with_adapter(image, hole, options.adapter);
    }
    return push_pull_fill<3>(image, hole);
}

Panorama
remove_layer(const Panorama &current, const Mask &layer_mask, const InpaintOptions &options) {
    return inpaint_rgb(current, layer_mask, options);
}

} // namespace panolayers
