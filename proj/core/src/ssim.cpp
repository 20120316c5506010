// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/ssim.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace panolayers {

namespace {

constexpr int kRadius = kSsimWindow / 2;

std::array<double, kSsimWindow>
gaussian_kernel() {
    std::array<double, kSsimWindow> k{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double x = i - kRadius;
        k[i]           = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i];
    }
    for (auto &v : k) {
        v /= sum;
    }
    return k;
}

/// Separable "same" convolution with zero padding; the kernel is symmetric,
/// so this is also its own adjoint.
std::vector<double>
blur(const std::vector<double> &src, int w, int h) {
    static const auto k = gaussian_kernel();
    std::vector<double> tmp(src.size()), out(src.size());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                const int cc = c + i;
                if (cc >= 0 && cc < w) {
                    acc += k[i + kRadius] * src[static_cast<std::size_t>(r) * w + cc];
                }
            }
            tmp[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) {
                const int rr = r + i;
                if (rr >= 0 && rr < h) {
                    acc += k[i + kRadius] * tmp[static_cast<std::size_t>(rr) * w + c];
                }
            }
            out[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
    return out;
}

} // namespace

double
ssim(const ColorImage &a, const ColorImage &b) {
    return ssim_with_grad(a, b, nullptr);
}

double
ssim_with_grad(const ColorImage &a, const ColorImage &b, ColorImage *grad_a) {
    require_same_dims(a, b, "ssim");
    const int w = a.width(), h = a.height();
    const std::size_t n = a.size();
    if (n == 0) {
        throw Error(ErrorCode::DimensionMismatch, "ssim of an empty image");
    }
    if (grad_a) {
        *grad_a = ColorImage(w, h, Rgbd::Zero());
    }
    const double norm = 1.0 / (3.0 * static_cast<double>(n));
    double total      = 0.0;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (int ch = 0; ch < 3; ++ch) {
        for (std::size_t i = 0; i < n; ++i) {
            x[i]  = a[i](ch);
            y[i]  = b[i](ch);
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mx = blur(x, w, h), my = blur(y, w, h);
        const auto exx = blur(xx, w, h), eyy = blur(yy, w, h), exy = blur(xy, w, h);
        std::vector<double> d_mu, d_exx, d_exy;
        if (grad_a) {
            d_mu.resize(n);
            d_exx.resize(n);
            d_exy.resize(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double sxx = exx[i] - mx[i] * mx[i];
            const double syy = eyy[i] - my[i] * my[i];
            const double sxy = exy[i] - mx[i] * my[i];
            const double n1  = 2.0 * mx[i] * my[i] + kSsimC1;
            const double n2  = 2.0 * sxy + kSsimC2;
            const double d1  = mx[i] * mx[i] + my[i] * my[i] + kSsimC1;
            const double d2  = sxx + syy + kSsimC2;
            const double s   = (n1 * n2) / (d1 * d2);
            total += s;
            if (grad_a) {
                const double ds_dmx  = 2.0 * my[i] * n2 / (d1 * d2) - s * 2.0 * mx[i] / d1;
                const double ds_dsxx = -s / d2;
                const double ds_dsxy = 2.0 * n1 / (d1 * d2);
                d_mu[i]  = norm * (ds_dmx - 2.0 * mx[i] * ds_dsxx - my[i] * ds_dsxy);
                d_exx[i] = norm * ds_dsxx;
                d_exy[i] = norm * ds_dsxy;
            }
        }
        if (grad_a) {
            const auto g_mu = blur(d_mu, w, h), g_xx = blur(d_exx, w, h), g_xy = blur(d_exy, w, h);
            for (std::size_t i = 0; i < n; ++i) {
                (*grad_a)[i](ch) = g_mu[i] + 2.0 * x[i] * g_xx[i] + y[i] * g_xy[i];
            }
        }
    }
    return total * norm;
}

} // namespace panolayers
