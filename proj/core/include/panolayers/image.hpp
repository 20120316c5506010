// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "panolayers/error.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace panolayers {

using Rgb  = Eigen::Vector3f;
using Rgbd = Eigen::Vector3d;

template <typename T>
T
zero_value() {
    if constexpr (requires { T::Zero(); }) {
        return T::Zero();
    } else {
        return T{};
    }
}

/// Dense row-major 2D buffer. Row 0 is the top row. Pixels start at zero
/// unless a fill value is given.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, const T &fill = zero_value<T>())
        : mWidth(width), mHeight(height), mData(static_cast<std::size_t>(width) * height, fill) {
        if (width < 0 || height < 0) {
            throw Error(ErrorCode::DimensionMismatch, "negative image size");
        }
    }

    int width() const noexcept { return mWidth; }
    int height() const noexcept { return mHeight; }
    std::size_t size() const noexcept { return mData.size(); }
    bool empty() const noexcept { return mData.empty(); }

    T &operator()(int row, int col) { return mData[index(row, col)]; }
    const T &operator()(int row, int col) const { return mData[index(row, col)]; }

    T &operator[](std::size_t i) { return mData[i]; }
    const T &operator[](std::size_t i) const { return mData[i]; }

    std::span<T> pixels() noexcept { return mData; }
    std::span<const T> pixels() const noexcept { return mData; }

    bool same_dims(int width, int height) const noexcept {
        return mWidth == width && mHeight == height;
    }
    template <typename U>
    bool same_dims(const Image<U> &other) const noexcept {
        return same_dims(other.width(), other.height());
    }

    bool operator==(const Image &other) const = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * mWidth + col;
    }

    int mWidth  = 0;
    int mHeight = 0;
    std::vector<T> mData;
};

/// Equirectangular RGB panorama, channels in [0,1].
using Panorama = Image<Rgb>;
/// Binary mask, values in {0,1}.
using Mask = Image<std::uint8_t>;
/// Radial depth in meters; 0 encodes a missing value.
using DepthMap = Image<float>;
/// Render-precision color image.
using ColorImage = Image<Rgbd>;

template <typename A, typename B>
void
require_same_dims(const Image<A> &a, const Image<B> &b, const std::string &what) {
    if (!a.same_dims(b)) {
        throw Error(ErrorCode::DimensionMismatch,
                    what + ": " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                        " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
}

inline std::size_t
count_set(const Mask &mask) {
    std::size_t n = 0;
    for (auto v : mask.pixels()) {
        n += v != 0;
    }
    return n;
}

inline Mask
mask_union(const Mask &a, const Mask &b) {
    require_same_dims(a, b, "mask union");
    Mask out(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (a[i] || b[i]) ? 1 : 0;
    }
    return out;
}

inline ColorImage
to_color_image(const Panorama &img) {
    ColorImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = img[i].cast<double>();
    }
    return out;
}

} // namespace panolayers
