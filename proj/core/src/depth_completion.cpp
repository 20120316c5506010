// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/depth_completion.hpp"

#include "panolayers/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace panolayers {
namespace {

using Depth1 = Eigen::Matrix<float, 1, 1>;

struct Neighbours {
    std::array<std::size_t, 4> index{};
    int count = 0;
};

/// 4-neighbourhood with longitude wrap; rows stop at the poles.
template <typename Fn>
void
for_each_neighbour(int r, int c, int w, int h, Fn &&fn) {
    if (r > 0) {
        fn(r - 1, c);
    }
    if (r + 1 < h) {
        fn(r + 1, c);
    }
    fn(r, (c + w - 1) % w);
    fn(r, (c + 1) % w);
}

} // namespace

DepthMap
harmonic_fill(const DepthMap &depth, const Mask &hole, const HarmonicSolverOptions &options,
              HarmonicSolveStats *stats) {
    require_same_dims(depth, hole, "depth hole");
    const int w = depth.width();
    const int h = depth.height();
    const auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };
    const auto known = [&](std::size_t i) { return !hole[i] && depth[i] > 0.0f && std::isfinite(depth[i]); };

    std::vector<std::size_t> unknowns;
    for (std::size_t i = 0; i < hole.size(); ++i) {
        if (hole[i]) {
            unknowns.push_back(i);
        }
    }
    if (stats) {
        *stats = {};
    }
    if (unknowns.empty()) {
        return depth;
    }

    // Every connected part of the hole needs at least one Dirichlet neighbour.
    std::vector<int> component(hole.size(), -1);
    int next_component = 0;
    int hole_extent    = 1;
    for (std::size_t seed : unknowns) {
        if (component[seed] >= 0) {
            continue;
        }
        bool anchored = false;
        int min_r = h, max_r = -1;
        std::size_t size = 0;
        std::vector<std::size_t> stack{seed};
        component[seed] = next_component;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++size;
            const int r = static_cast<int>(i / w);
            const int c = static_cast<int>(i % w);
            min_r       = std::min(min_r, r);
            max_r       = std::max(max_r, r);
            for_each_neighbour(r, c, w, h, [&](int nr, int nc) {
                const std::size_t j = idx(nr, nc);
                if (hole[j]) {
                    if (component[j] < 0) {
                        component[j] = next_component;
                        stack.push_back(j);
                    }
                } else if (known(j)) {
                    anchored = true;
                }
            });
        }
        if (!anchored) {
            throw Error(ErrorCode::InsufficientBoundary,
                        "a hole region of " + std::to_string(size) + " pixels near row " + std::to_string(min_r) +
                            " has no known depth on its boundary");
        }
        hole_extent = std::max({hole_extent, max_r - min_r + 1, static_cast<int>(std::sqrt(double(size)))});
        ++next_component;
    }

    // Push-pull over the known depth gives the starting guess.
    Image<Depth1> lifted(w, h);
    Mask unknown_or_missing(w, h);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        lifted[i](0)          = known(i) ? depth[i] : 0.0f;
        unknown_or_missing[i] = known(i) ? 0 : 1;
    }
    const Image<Depth1> guess = push_pull_fill<1>(lifted, unknown_or_missing);

    std::vector<double> value(depth.size(), 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < depth.size(); ++i) {
        if (known(i)) {
            value[i] = depth[i];
            scale    = std::max(scale, static_cast<double>(depth[i]));
        } else if (hole[i]) {
            value[i] = guess[i](0);
        }
    }

    std::vector<Neighbours> stencil(unknowns.size());
    for (std::size_t k = 0; k < unknowns.size(); ++k) {
        const int r = static_cast<int>(unknowns[k] / w);
        const int c = static_cast<int>(unknowns[k] % w);
        for_each_neighbour(r, c, w, h, [&](int nr, int nc) {
            const std::size_t j = idx(nr, nc);
            if (hole[j] || known(j)) {
                stencil[k].index[stencil[k].count++] = j;
            }
        });
    }

    const double omega = std::min(1.95, 2.0 / (1.0 + std::sin(std::numbers::pi / (hole_extent + 1))));
    int iteration      = 0;
    double residual    = 0.0;
    for (; iteration < options.max_iterations; ++iteration) {
        for (std::size_t k = 0; k < unknowns.size(); ++k) {
            const auto &s = stencil[k];
            double sum    = 0.0;
            for (int n = 0; n < s.count; ++n) {
                sum += value[s.index[n]];
            }
            double &v = value[unknowns[k]];
            v += omega * (sum / s.count - v);
        }
        if (iteration % 8 == 7 || iteration + 1 == options.max_iterations) {
            residual = 0.0;
            for (std::size_t k = 0; k < unknowns.size(); ++k) {
                const auto &s = stencil[k];
                double sum    = 0.0;
                for (int n = 0; n < s.count; ++n) {
                    sum += value[s.index[n]];
                }
                residual = std::max(residual, std::abs(sum / s.count - value[unknowns[k]]));
            }
            residual /= scale;
            if (residual < options.tolerance) {
                ++iteration;
                break;
            }
        }
    }
    if (stats) {
        stats->iterations        = iteration;
        stats->relative_residual = residual;
    }

    DepthMap out = depth;
    for (std::size_t i : unknowns) {
        out[i] = static_cast<float>(value[i]);
    }
    return out;
}

DepthMap
complete_depth(const Panorama &rgb, const DepthMap &depth, const Mask &hole, const DepthMap &occluder_depth,
               const HarmonicSolverOptions &options) {
    require_same_dims(rgb, depth, "depth completion color");
    require_same_dims(occluder_depth, depth, "occluder depth");
    DepthMap out = harmonic_fill(depth, hole, options);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const float occ = occluder_depth[i];
        if (hole[i] && occ > 0.0f && std::isfinite(occ)) {
            out[i] = std::max(out[i], occ + kDepthEpsilon);
        }
    }
    return out;
}

} // namespace panolayers
