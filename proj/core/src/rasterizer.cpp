// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/rasterizer.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace panolayers {

namespace {

constexpr double kFootprintPower = -0.5 * kFootprintSigma * kFootprintSigma;
const double kFootprintFloor     = std::exp(kFootprintPower);

/// Gaussian falloff shifted to reach zero at the cutoff, with peak 1.
double
footprint(double power) {
    return (std::exp(power) - kFootprintFloor) / (1.0 - kFootprintFloor);
}

struct ViewParams {
    Eigen::Matrix3d world_to_camera;
    Point3 center;
    double fx, fy, cx, cy;
    int width, height;
    double lim_x, lim_y; ///< bound on |t.x / t.z| and |t.y / t.z| inside the Jacobian

    explicit ViewParams(const CameraView &view)
        : world_to_camera(view.world_to_camera()), center(view.position), fx(view.intrinsics.fx()),
          fy(view.intrinsics.fy()), cx(view.intrinsics.cx()), cy(view.intrinsics.cy()),
          width(view.intrinsics.width), height(view.intrinsics.height),
          lim_x(kJacobianClamp * 0.5 * width / fx), lim_y(kJacobianClamp * 0.5 * height / fy) {}
};

/// Every intermediate of the projection chain, shared by forward and backward.
struct Projection {
    Eigen::Vector4d q_unit;
    double q_norm = 1.0;
    Eigen::Matrix3d rotation;
    Eigen::Vector3d variance; ///< diagonal of S S^T
    Eigen::Matrix3d sigma;
    Eigen::Vector3d t;        ///< camera-space center
    Eigen::Matrix<double, 2, 3> jacobian;
    double ux = 0.0, uy = 0.0; ///< clamped t.x / t.z and t.y / t.z
    bool clamped_x = false, clamped_y = false;
    Eigen::Matrix<double, 2, 3> m; ///< jacobian * world_to_camera
    Eigen::Matrix2d cov2d;
    Eigen::Matrix2d conic;
    Eigen::Vector2d mean;
};

bool
project(const Splat &s, const ViewParams &v, Projection &p) {
    p.t = v.world_to_camera * (s.position - v.center);
    if (p.t.z() <= kNearPlane) {
        return false;
    }
    p.q_norm   = s.rotation.norm();
    p.q_unit   = s.rotation / p.q_norm;
    p.rotation = quaternion_to_rotation(p.q_unit);
    p.variance = (2.0 * s.log_scale).array().exp();
    p.sigma    = p.rotation * p.variance.asDiagonal() * p.rotation.transpose();

    const double tx = p.t.x(), ty = p.t.y(), tz = p.t.z();
    const double iz = 1.0 / tz;
    p.ux        = std::clamp(tx * iz, -v.lim_x, v.lim_x);
    p.uy        = std::clamp(ty * iz, -v.lim_y, v.lim_y);
    p.clamped_x = p.ux != tx * iz;
    p.clamped_y = p.uy != ty * iz;
    p.jacobian << v.fx * iz, 0.0, -v.fx * p.ux * iz, 0.0, v.fy * iz, -v.fy * p.uy * iz;
    p.m     = p.jacobian * v.world_to_camera;
    p.cov2d = p.m * p.sigma * p.m.transpose();
    p.cov2d(0, 0) += kCovarianceDilation;
    p.cov2d(1, 1) += kCovarianceDilation;
    p.conic = p.cov2d.inverse();
    p.mean  = {v.fx * tx * iz + v.cx, v.fy * ty * iz + v.cy};

    const double rx = kCullSigma * std::sqrt(p.cov2d(0, 0));
    const double ry = kCullSigma * std::sqrt(p.cov2d(1, 1));
    return !(p.mean.x() + rx < 0.0 || p.mean.x() - rx > v.width - 1 || p.mean.y() + ry < 0.0 ||
             p.mean.y() - ry > v.height - 1);
}

/// Forward compositing of one pixel over a front-to-back candidate list.
template <typename List>
void
composite_pixel(const RasterContext &ctx, const List &list, int px, int py, Rgbd &color, double &depth,
                double &transmittance, int &last) {
    double T    = 1.0;
    Rgbd c      = Rgbd::Zero();
    double dsum = 0.0;
    const int n = static_cast<int>(list.size());
    int k       = 0;
    for (; k < n; ++k) {
        const auto &e = ctx.entries[list[k]];
        if (px < e.x0 || px > e.x1 || py < e.y0 || py > e.y1) {
            continue;
        }
        const double dx    = px - e.mean.x();
        const double dy    = py - e.mean.y();
        const double power = -0.5 * (e.conic(0, 0) * dx * dx + e.conic(1, 1) * dy * dy) - e.conic(0, 1) * dx * dy;
        if (power < kFootprintPower) {
            continue;
        }
        const double alpha = std::min(kMaxAlpha, e.opacity * footprint(power));
        const double w     = alpha * T;
        c += w * e.color;
        dsum += w * e.depth;
        T *= 1.0 - alpha;
        if (T < kMinTransmittance) {
            ++k;
            break;
        }
    }
    last          = k;
    transmittance = T;
    color         = c + T * ctx.background;
    depth         = T < 1.0 ? dsum / (1.0 - T) : 0.0;
}

struct IotaList {
    int n;
    std::size_t size() const { return static_cast<std::size_t>(n); }
    int operator[](int k) const { return k; }
};

} // namespace

Eigen::Matrix3d
quaternion_to_rotation(const Eigen::Vector4d &q) {
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Eigen::Matrix3d r;
    r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y), //
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),  //
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return r;
}

std::optional<ProjectedGaussian>
project_gaussian(const Splat &splat, const CameraView &view) {
    Projection p;
    if (!project(splat, ViewParams(view), p)) {
        return std::nullopt;
    }
    return ProjectedGaussian{p.mean, p.cov2d, p.t.z()};
}

RenderedView
rasterize(std::span<const Splat> splats, const CameraView &view, const RasterSettings &settings,
          RasterContext *context) {
    view.intrinsics.validate();
    const ViewParams v(view);
    RasterContext local;
    RasterContext &ctx = context ? *context : local;
    ctx                = RasterContext{};
    ctx.width          = v.width;
    ctx.height         = v.height;
    ctx.background     = settings.background;

    for (std::size_t i = 0; i < splats.size(); ++i) {
        const Splat &s = splats[i];
        if (!s.finite()) {
            throw Error(ErrorCode::InvalidSplat, "splat " + std::to_string(i) + " has non-finite parameters");
        }
        Projection p;
        if (!project(s, v, p)) {
            continue;
        }
        RasterContext::Entry e;
        e.splat   = static_cast<int>(i);
        e.mean    = p.mean;
        e.conic   = p.conic;
        e.color   = s.color.cwiseMax(0.0).cwiseMin(1.0);
        e.opacity = s.opacity();
        e.depth   = p.t.z();
        const double rx = kFootprintSigma * std::sqrt(p.cov2d(0, 0));
        const double ry = kFootprintSigma * std::sqrt(p.cov2d(1, 1));
        e.x0 = static_cast<int>(std::max(0.0, std::ceil(p.mean.x() - rx)));
        e.x1 = static_cast<int>(std::min<double>(v.width - 1, std::floor(p.mean.x() + rx)));
        e.y0 = static_cast<int>(std::max(0.0, std::ceil(p.mean.y() - ry)));
        e.y1 = static_cast<int>(std::min<double>(v.height - 1, std::floor(p.mean.y() + ry)));
        if (e.x0 > e.x1 || e.y0 > e.y1) {
            continue;
        }
        ctx.entries.push_back(e);
    }
    std::stable_sort(ctx.entries.begin(), ctx.entries.end(),
                     [](const auto &a, const auto &b) { return a.depth < b.depth; });

    RenderedView out{ColorImage(v.width, v.height), Image<double>(v.width, v.height),
                     Image<double>(v.width, v.height)};
    const std::size_t pixel_count = static_cast<std::size_t>(v.width) * v.height;
    ctx.last.assign(pixel_count, 0);
    ctx.final_transmittance.assign(pixel_count, 1.0);

    const auto shade = [&](const auto &list, int px, int py) {
        const std::size_t idx = static_cast<std::size_t>(py) * v.width + px;
        double depth          = 0.0;
        composite_pixel(ctx, list, px, py, out.color[idx], depth, ctx.final_transmittance[idx], ctx.last[idx]);
        out.alpha[idx] = 1.0 - ctx.final_transmittance[idx];
        out.depth[idx] = depth;
    };

    if (!settings.tiled) {
        const IotaList all{static_cast<int>(ctx.entries.size())};
        for (int py = 0; py < v.height; ++py) {
            for (int px = 0; px < v.width; ++px) {
                shade(all, px, py);
            }
        }
        return out;
    }

    const int ts    = std::max(1, settings.tile_size);
    ctx.tile_size   = ts;
    ctx.tiles_x     = (v.width + ts - 1) / ts;
    const int tiles_y = (v.height + ts - 1) / ts;
    ctx.tiles.assign(static_cast<std::size_t>(ctx.tiles_x) * tiles_y, {});
    for (int k = 0; k < static_cast<int>(ctx.entries.size()); ++k) {
        const auto &e = ctx.entries[k];
        for (int ty = e.y0 / ts; ty <= e.y1 / ts; ++ty) {
            for (int tx = e.x0 / ts; tx <= e.x1 / ts; ++tx) {
                ctx.tiles[static_cast<std::size_t>(ty) * ctx.tiles_x + tx].push_back(k);
            }
        }
    }
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < ctx.tiles_x; ++tx) {
            const auto &list = ctx.tiles[static_cast<std::size_t>(ty) * ctx.tiles_x + tx];
            for (int py = ty * ts; py < std::min(v.height, (ty + 1) * ts); ++py) {
                for (int px = tx * ts; px < std::min(v.width, (tx + 1) * ts); ++px) {
                    shade(list, px, py);
                }
            }
        }
    }
    return out;
}

namespace {

struct EntryGrad {
    Eigen::Vector2d mean  = Eigen::Vector2d::Zero();
    Eigen::Matrix2d conic = Eigen::Matrix2d::Zero();
    double opacity        = 0.0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

template <typename List>
void
backward_pixel(const RasterContext &ctx, const List &list, int px, int py, const Rgbd &dl_dc,
               std::vector<EntryGrad> &grads) {
    const std::size_t idx = static_cast<std::size_t>(py) * ctx.width + px;
    const double t_final  = ctx.final_transmittance[idx];
    const double bg_dot   = ctx.background.dot(dl_dc);
    double T              = t_final;
    Rgbd accum            = Rgbd::Zero();
    Rgbd last_color       = Rgbd::Zero();
    double last_alpha     = 0.0;
    for (int k = ctx.last[idx] - 1; k >= 0; --k) {
        const int entry = list[k];
        const auto &e   = ctx.entries[entry];
        if (px < e.x0 || px > e.x1 || py < e.y0 || py > e.y1) {
            continue;
        }
        const double dx    = px - e.mean.x();
        const double dy    = py - e.mean.y();
        const double power = -0.5 * (e.conic(0, 0) * dx * dx + e.conic(1, 1) * dy * dy) - e.conic(0, 1) * dx * dy;
        if (power < kFootprintPower) {
            continue;
        }
        const double g     = footprint(power);
        const double raw   = e.opacity * g;
        const double alpha = std::min(kMaxAlpha, raw);
        T /= 1.0 - alpha;

        auto &gr = grads[entry];
        gr.color += alpha * T * dl_dc;
        accum      = last_alpha * last_color + (1.0 - last_alpha) * accum;
        last_color = e.color;
        last_alpha = alpha;
        double dl_dalpha = T * (e.color - accum).dot(dl_dc) - t_final / (1.0 - alpha) * bg_dot;
        if (raw > kMaxAlpha) {
            continue;
        }
        gr.opacity += g * dl_dalpha;
        const double dl_dpower = e.opacity * std::exp(power) / (1.0 - kFootprintFloor) * dl_dalpha;
        const Eigen::Vector2d delta(dx, dy);
        gr.mean += dl_dpower * (e.conic * delta);
        gr.conic += (-0.5 * dl_dpower) * (delta * delta.transpose());
    }
}

Eigen::Vector4d
rotation_grad_to_quaternion(const Eigen::Matrix3d &dr, const Eigen::Vector4d &q) {
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Eigen::Vector4d g;
    g(0) = 2.0 * (-z * dr(0, 1) + y * dr(0, 2) + z * dr(1, 0) - x * dr(1, 2) - y * dr(2, 0) + x * dr(2, 1));
    g(1) = 2.0 * (y * dr(0, 1) + z * dr(0, 2) + y * dr(1, 0) - 2.0 * x * dr(1, 1) - w * dr(1, 2) + z * dr(2, 0) +
                  w * dr(2, 1) - 2.0 * x * dr(2, 2));
    g(2) = 2.0 * (-2.0 * y * dr(0, 0) + x * dr(0, 1) + w * dr(0, 2) + x * dr(1, 0) + z * dr(1, 2) - w * dr(2, 0) +
                  z * dr(2, 1) - 2.0 * y * dr(2, 2));
    g(3) = 2.0 * (-2.0 * z * dr(0, 0) - w * dr(0, 1) + x * dr(0, 2) + w * dr(1, 0) - 2.0 * z * dr(1, 1) +
                  y * dr(1, 2) + x * dr(2, 0) + y * dr(2, 1));
    return g;
}

} // namespace

std::vector<SplatGradient>
rasterize_backward(std::span<const Splat> splats, const CameraView &view, const RasterContext &ctx,
                   const ColorImage &color_grad) {
    if (!color_grad.same_dims(ctx.width, ctx.height)) {
        throw Error(ErrorCode::DimensionMismatch, "color gradient does not match the rendered view");
    }
    std::vector<EntryGrad> eg(ctx.entries.size());
    if (ctx.tile_size == 0) {
        const IotaList all{static_cast<int>(ctx.entries.size())};
        for (int py = 0; py < ctx.height; ++py) {
            for (int px = 0; px < ctx.width; ++px) {
                backward_pixel(ctx, all, px, py, color_grad(py, px), eg);
            }
        }
    } else {
        const int ts = ctx.tile_size;
        for (int py = 0; py < ctx.height; ++py) {
            for (int px = 0; px < ctx.width; ++px) {
                const auto &tile = ctx.tiles[static_cast<std::size_t>((py / ts) * ctx.tiles_x + px / ts)];
                backward_pixel(ctx, tile, px, py, color_grad(py, px), eg);
            }
        }
    }

    const ViewParams v(view);
    std::vector<SplatGradient> grads(splats.size());
    for (auto &g : grads) {
        g.rotation.setZero();
    }
    for (std::size_t k = 0; k < ctx.entries.size(); ++k) {
        const auto &e  = ctx.entries[k];
        const Splat &s = splats[e.splat];
        const auto &ge = eg[k];
        Projection p;
        project(s, v, p);
        SplatGradient &out = grads[e.splat];

        for (int c = 0; c < 3; ++c) {
            out.color(c) = (s.color(c) >= 0.0 && s.color(c) <= 1.0) ? ge.color(c) : 0.0;
        }
        out.opacity_logit = ge.opacity * e.opacity * (1.0 - e.opacity);

        const Eigen::Matrix2d d_cov2d = -p.conic * ge.conic * p.conic;
        const Eigen::Matrix3d d_sigma = p.m.transpose() * d_cov2d * p.m;
        const Eigen::Matrix<double, 2, 3> d_m = 2.0 * d_cov2d * p.m * p.sigma;
        const Eigen::Matrix<double, 2, 3> d_j = d_m * v.world_to_camera.transpose();

        const double tx = p.t.x(), ty = p.t.y(), tz = p.t.z();
        const double iz = 1.0 / tz, iz2 = iz * iz, iz3 = iz2 * iz;
        Eigen::Vector3d d_t;
        const double jx_x = p.clamped_x ? 0.0 : -v.fx * iz2;
        const double jy_y = p.clamped_y ? 0.0 : -v.fy * iz2;
        const double jx_z = p.clamped_x ? v.fx * p.ux * iz2 : 2.0 * v.fx * tx * iz3;
        const double jy_z = p.clamped_y ? v.fy * p.uy * iz2 : 2.0 * v.fy * ty * iz3;
        d_t.x() = jx_x * d_j(0, 2) + v.fx * iz * ge.mean.x();
        d_t.y() = jy_y * d_j(1, 2) + v.fy * iz * ge.mean.y();
        d_t.z() = -v.fx * iz2 * d_j(0, 0) + jx_z * d_j(0, 2) - v.fy * iz2 * d_j(1, 1) + jy_z * d_j(1, 2) -
                  v.fx * tx * iz2 * ge.mean.x() - v.fy * ty * iz2 * ge.mean.y();
        out.position = v.world_to_camera.transpose() * d_t;

        const Eigen::Matrix3d d_rot = 2.0 * d_sigma * p.rotation * p.variance.asDiagonal();
        const Eigen::Matrix3d rsr   = p.rotation.transpose() * d_sigma * p.rotation;
        for (int i = 0; i < 3; ++i) {
            out.log_scale(i) = 2.0 * p.variance(i) * rsr(i, i);
        }
        const Eigen::Vector4d d_qhat = rotation_grad_to_quaternion(d_rot, p.q_unit);
        out.rotation = (d_qhat - p.q_unit * p.q_unit.dot(d_qhat)) / p.q_norm;
    }
    return grads;
}

LayerFilter
all_layers() {
    return {kAllLayers.begin(), kAllLayers.end()};
}

std::vector<Splat>
gather_splats(const SplatScene &scene, const LayerFilter &filter, std::map<LayerIndex, std::size_t> *offsets) {
    std::vector<Splat> out;
    for (auto layer : kAllLayers) {
        if (std::find(filter.begin(), filter.end(), layer) == filter.end()) {
            continue;
        }
        if (offsets) {
            (*offsets)[layer] = out.size();
        }
        const auto it = scene.layers.find(layer);
        if (it != scene.layers.end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    return out;
}

RenderedView
render_scene(const SplatScene &scene, const CameraView &view, const LayerFilter &filter,
             const RasterSettings &settings) {
    if (filter.empty()) {
        throw Error(ErrorCode::EmptyFilter, "render_scene needs at least one layer");
    }
    const auto splats = gather_splats(scene, filter);
    return rasterize(splats, view, settings);
}

} // namespace panolayers
