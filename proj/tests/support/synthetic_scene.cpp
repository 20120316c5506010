// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthetic_scene.hpp"

#include "panolayers/io.hpp"
#include "panolayers/sampling.hpp"

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include <cmath>

namespace panolayers::testsupport {

namespace {

constexpr double kGroundY   = -1.6;
constexpr double kWallR     = 10.0;
constexpr double kWallTop   = 3.0;

struct Cylinder {
    double cx, cz, radius, y0, y1;
    int label;
};

struct Sphere {
    Point3 center;
    double radius;
    int label;
};

const Cylinder kTrunk{4.0, 1.0, 0.25, kGroundY, 0.5, kTreeLabel};
const Sphere kCrown{{4.0, 1.2, 1.0}, 1.0, kTreeLabel};
const Cylinder kPole{-1.0, -4.0, 0.15, kGroundY, 2.5, kPoleLabel};
const Cylinder kPerson{-2.5, 1.8, 0.3, kGroundY, 0.1, kPersonLabel};

std::optional<double>
hit_cylinder_outside(const Cylinder &c, const Point3 &o, const Point3 &d) {
    const double ox = o.x() - c.cx, oz = o.z() - c.cz;
    const double a  = d.x() * d.x() + d.z() * d.z();
    if (a < 1e-15) {
        return std::nullopt;
    }
    const double b    = 2.0 * (ox * d.x() + oz * d.z());
    const double cc   = ox * ox + oz * oz - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double t = (-b - std::sqrt(disc)) / (2.0 * a);
    if (t <= 1e-9) {
        return std::nullopt;
    }
    const double y = o.y() + t * d.y();
    if (y < c.y0 || y > c.y1) {
        return std::nullopt;
    }
    return t;
}

std::optional<double>
hit_sphere(const Sphere &s, const Point3 &o, const Point3 &d) {
    const Point3 oc   = o - s.center;
    const double b    = oc.dot(d);
    const double c    = oc.squaredNorm() - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double t = -b - std::sqrt(disc);
    return t > 1e-9 ? std::optional<double>(t) : std::nullopt;
}

Rgb
surface_color(int label, const Point3 &p) {
    switch (label) {
    case kBuildingLabel: {
        const double ang = std::atan2(p.z(), p.x());
        return Rgb(0.55f + 0.15f * static_cast<float>(std::sin(2.0 * ang)),
                   0.45f + 0.1f * static_cast<float>(std::cos(3.0 * ang)),
                   0.35f + 0.05f * static_cast<float>((p.y() - kGroundY) / (kWallTop - kGroundY)));
    }
    case kRoadLabel: {
        const double r = std::hypot(p.x(), p.z());
        return Rgb(0.3f + 0.02f * static_cast<float>(r), 0.3f + 0.02f * static_cast<float>(r), 0.32f);
    }
    case kTreeLabel: return p.y() > 0.5 ? Rgb(0.15f, 0.55f, 0.2f) : Rgb(0.4f, 0.27f, 0.15f);
    case kPoleLabel: return Rgb(0.75f, 0.75f, 0.78f);
    case kPersonLabel: return Rgb(0.85f, 0.2f, 0.25f);
    default: return Rgb::Zero();
    }
}

Rgb
sky_color(const Point3 &d) {
    const float e = static_cast<float>(std::max(0.0, d.y()));
    return Rgb(0.5f + 0.2f * e, 0.7f + 0.15f * e, 0.95f);
}

double
sample_normal(std::mt19937_64 &rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

} // namespace

std::map<int, std::string>
scene_labels() {
    return {{kSkyLabel, "sky"},   {kBuildingLabel, "building"}, {kRoadLabel, "road"},
            {kTreeLabel, "tree"}, {kPoleLabel, "pole"},         {kPersonLabel, "person"}};
}

SceneHit
trace_scene(const Point3 &origin, const Point3 &direction) {
    const Point3 d = direction.normalized();
    double best    = std::numeric_limits<double>::infinity();
    int label      = kSkyLabel;
    const auto consider = [&](std::optional<double> t, int l) {
        if (t && *t < best) {
            best  = *t;
            label = l;
        }
    };
    if (d.y() < 0.0) {
        const double t = (kGroundY - origin.y()) / d.y();
        const Point3 p = origin + t * d;
        if (std::hypot(p.x(), p.z()) <= kWallR) {
            consider(t, kRoadLabel);
        }
    }
    {
        // Inside of the wall cylinder.
        const double a    = d.x() * d.x() + d.z() * d.z();
        const double b    = 2.0 * (origin.x() * d.x() + origin.z() * d.z());
        const double c    = origin.x() * origin.x() + origin.z() * origin.z() - kWallR * kWallR;
        const double disc = b * b - 4.0 * a * c;
        if (a > 1e-15 && disc >= 0.0) {
            const double t = (-b + std::sqrt(disc)) / (2.0 * a);
            const double y = origin.y() + t * d.y();
            if (t > 0.0 && y >= kGroundY && y <= kWallTop) {
                consider(t, kBuildingLabel);
            }
        }
    }
    for (const auto *c : {&kTrunk, &kPole, &kPerson}) {
        consider(hit_cylinder_outside(*c, origin, d), c->label);
    }
    consider(hit_sphere(kCrown, origin, d), kCrown.label);
    if (label == kSkyLabel) {
        return {0.0, kSkyLabel, sky_color(d)};
    }
    return {best, label, surface_color(label, origin + best * d)};
}

Fixture
render_fixture(int width, int height) {
    Fixture f{Panorama(width, height), LabelImage(width, height), scene_labels(), DepthMap(width, height, 0.0f)};
    const PanoDims dims{height, width};
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const auto hit = trace_scene(Point3::Zero(), direction_vector(pixel_to_angles(r, c, dims)));
            f.pano(r, c)   = hit.color;
            f.labels(r, c) = static_cast<std::uint16_t>(hit.label);
            f.depth(r, c)  = static_cast<float>(hit.distance);
        }
    }
    return f;
}

void
write_fixture(const Fixture &fixture, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    write_rgb_png(dir / "panorama.png", fixture.pano);
    write_label_png(dir / "segments.png", fixture.labels);
    nlohmann::json labels = nlohmann::json::object();
    for (const auto &[id, name] : fixture.names) {
        labels[std::to_string(id)] = name;
    }
    write_text_atomic(dir / "labels.json", labels.dump(2) + "\n");
    write_pfm(dir / "depth.pfm", fixture.depth);
}

Panorama
render_pinhole(const CameraView &view) {
    const auto &in = view.intrinsics;
    Panorama out(in.width, in.height);
    for (int v = 0; v < in.height; ++v) {
        for (int u = 0; u < in.width; ++u) {
            out(v, u) = trace_scene(view.position, view.pixel_ray(u, v)).color;
        }
    }
    return out;
}

Rgb
smooth_color(const Point3 &d) {
    return Rgb(static_cast<float>(0.5 + 0.3 * d.x()), static_cast<float>(0.5 + 0.3 * d.y()),
               static_cast<float>(0.5 + 0.3 * d.z()));
}

Panorama
smooth_panorama(int width, int height) {
    Panorama out(width, height);
    const PanoDims dims{height, width};
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            out(r, c) = smooth_color(direction_vector(pixel_to_angles(r, c, dims)));
        }
    }
    return out;
}

std::filesystem::path
fixture_dir() {
    return PANOLAYERS_TEST_DATA_DIR;
}

Splat
random_splat(std::mt19937_64 &rng, double min_depth, double max_depth) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Splat s;
    const double depth = min_depth + (max_depth - min_depth) * u(rng);
    s.position         = {depth, (u(rng) - 0.5) * 0.6 * depth, (u(rng) - 0.5) * 0.6 * depth};
    s.rotation         = Eigen::Vector4d(sample_normal(rng), sample_normal(rng), sample_normal(rng), sample_normal(rng));
    s.rotation *= 0.8 + 0.4 * u(rng);
    for (int i = 0; i < 3; ++i) {
        s.log_scale(i) = std::log(0.03 + 0.12 * u(rng));
        s.color(i)     = 0.05 + 0.9 * u(rng);
    }
    s.opacity_logit = logit(0.1 + 0.6 * u(rng));
    return s;
}

SplatScene
reference_scene(std::uint64_t seed, int sky_count, int wall_count, int fg_count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SplatScene scene;
    scene.pano = {1024, 2048};

    auto &sky            = scene.layers[LayerIndex::Sky];
    const double golden  = kPi * (3.0 - std::sqrt(5.0));
    const double sky_r   = 30.0;
    const double sky_sig = 0.7 * sky_r * std::sqrt(4.0 * kPi / sky_count);
    for (int i = 0; i < sky_count; ++i) {
        const double y  = 1.0 - 2.0 * (i + 0.5) / sky_count;
        const double rr = std::sqrt(1.0 - y * y);
        const double a  = golden * i;
        Splat s;
        s.position      = sky_r * Point3(rr * std::cos(a), y, rr * std::sin(a));
        s.log_scale     = Eigen::Vector3d::Constant(std::log(sky_sig));
        s.opacity_logit = logit(0.9);
        s.color         = {0.45 + 0.2 * (y + 1.0) * 0.5, 0.65 + 0.1 * u(rng), 0.9};
        sky.push_back(s);
    }

    auto &wall              = scene.layers[LayerIndex::Background];
    const double wall_r     = 10.0, y0 = -1.6, y1 = 3.0;
    const int rows          = std::max(1, static_cast<int>(std::round(std::sqrt(wall_count * (y1 - y0) / (2.0 * kPi * wall_r)))));
    const int cols          = std::max(1, wall_count / rows);
    const double col_step   = 2.0 * kPi * wall_r / cols;
    const double row_step   = (y1 - y0) / rows;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double a = 2.0 * kPi * (c + 0.5 * (r % 2)) / cols;
            Splat s;
            s.position = {wall_r * std::cos(a), y0 + (r + 0.5) * row_step, wall_r * std::sin(a)};
            // Flattened against the wall: thin along the radial direction.
            const Eigen::Quaterniond q(Eigen::AngleAxisd(-a, Eigen::Vector3d::UnitY()));
            s.rotation  = {q.w(), q.x(), q.y(), q.z()};
            s.log_scale = {std::log(0.15), std::log(0.6 * row_step), std::log(0.6 * col_step)};
            s.opacity_logit = logit(0.85);
            s.color = {0.5 + 0.2 * std::sin(3.0 * a), 0.4 + 0.15 * std::cos(2.0 * a), 0.3 + 0.1 * u(rng)};
            wall.push_back(s);
        }
    }

    auto &fg = scene.layers[LayerIndex::Foreground];
    const std::array<Point3, 5> centers{Point3(4.0, 0.0, 0.5), Point3(-0.5, 0.3, 4.0), Point3(-3.5, -0.4, -2.0),
                                        Point3(1.0, 0.8, -3.8), Point3(-2.8, 0.5, 2.9)};
    const int per_disk = std::max(1, fg_count / static_cast<int>(centers.size()));
    for (const auto &center : centers) {
        const Point3 n  = center.normalized();
        const Point3 t1 = n.cross(Point3::UnitY()).normalized();
        const Point3 t2 = n.cross(t1);
        const Eigen::Matrix3d basis = (Eigen::Matrix3d() << n, t1, t2).finished();
        const Eigen::Quaterniond q(basis);
        const Rgbd color(0.2 + 0.6 * u(rng), 0.2 + 0.6 * u(rng), 0.2 + 0.6 * u(rng));
        for (int i = 0; i < per_disk; ++i) {
            const double rad = 0.7 * std::sqrt((i + 0.5) / per_disk);
            const double a   = golden * i;
            Splat s;
            s.position      = center + rad * (std::cos(a) * t1 + std::sin(a) * t2);
            s.rotation      = {q.w(), q.x(), q.y(), q.z()};
            s.log_scale     = {std::log(0.01), std::log(0.04), std::log(0.04)};
            s.opacity_logit = logit(0.8);
            s.color         = color + Rgbd::Constant(0.1 * (rad - 0.35));
            fg.push_back(s);
        }
    }
    return scene;
}

SplatScene
perturb_scene(const SplatScene &scene, double level, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SplatScene out = scene;
    for (auto &[_, splats] : out.layers) {
        for (auto &s : splats) {
            const double extent = s.scale().maxCoeff();
            for (int i = 0; i < 3; ++i) {
                s.position(i) += level * extent * sample_normal(rng);
            }
            for (int i = 0; i < 4; ++i) {
                s.rotation(i) += level * sample_normal(rng);
            }
            s.rotation.normalize();
            for (int i = 0; i < 3; ++i) {
                s.log_scale(i) += std::log1p(level * sample_normal(rng));
                s.color(i) *= 1.0 + level * sample_normal(rng);
            }
            const double o  = std::clamp(s.opacity() * (1.0 + level * sample_normal(rng)), 0.02, 0.98);
            s.opacity_logit = logit(o);
        }
    }
    return out;
}

} // namespace panolayers::testsupport
