// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "panolayers/io.hpp"

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace panolayers {
namespace {

fs::path
temp_sibling(const fs::path &path) {
    fs::path tmp = path;
    tmp.replace_filename("." + path.stem().string() + ".tmp" + path.extension().string());
    return tmp;
}

void
imwrite_atomic(const fs::path &path, const cv::Mat &mat) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    const fs::path tmp = temp_sibling(path);
    if (!cv::imwrite(tmp.string(), mat)) {
        throw Error(ErrorCode::Io, "cannot write image " + path.string());
    }
    fs::rename(tmp, path);
}

cv::Mat
imread_checked(const fs::path &path, int flags) {
    if (!fs::exists(path)) {
        throw Error(ErrorCode::Io, "no such file: " + path.string());
    }
    cv::Mat mat = cv::imread(path.string(), flags);
    if (mat.empty()) {
        throw Error(ErrorCode::Io, "cannot decode image " + path.string());
    }
    return mat;
}

std::uint8_t
to_u8(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

} // namespace

Panorama
read_rgb_image(const fs::path &path) {
    cv::Mat mat = imread_checked(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_COLOR);
    const double scale = mat.depth() == CV_16U ? 1.0 / 65535.0 : 1.0 / 255.0;
    cv::Mat f;
    mat.convertTo(f, CV_32FC3, scale);
    Panorama out(f.cols, f.rows);
    for (int r = 0; r < f.rows; ++r) {
        const auto *row = f.ptr<cv::Vec3f>(r);
        for (int c = 0; c < f.cols; ++c) {
            out(r, c) = Rgb(row[c][2], row[c][1], row[c][0]);
        }
    }
    return out;
}

void
write_rgb_png(const fs::path &path, const Panorama &img) {
    cv::Mat mat(img.height(), img.width(), CV_8UC3);
    for (int r = 0; r < img.height(); ++r) {
        auto *row = mat.ptr<cv::Vec3b>(r);
        for (int c = 0; c < img.width(); ++c) {
            const Rgb &p = img(r, c);
            row[c]       = cv::Vec3b(to_u8(p.z()), to_u8(p.y()), to_u8(p.x()));
        }
    }
    imwrite_atomic(path, mat);
}

void
write_rgb_png(const fs::path &path, const ColorImage &img) {
    Panorama f(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        f[i] = img[i].cast<float>();
    }
    write_rgb_png(path, f);
}

Mask
read_mask_png(const fs::path &path) {
    cv::Mat mat = imread_checked(path, cv::IMREAD_GRAYSCALE);
    Mask out(mat.cols, mat.rows);
    for (int r = 0; r < mat.rows; ++r) {
        const auto *row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < mat.cols; ++c) {
            out(r, c) = row[c] ? 1 : 0;
        }
    }
    return out;
}

void
write_mask_png(const fs::path &path, const Mask &mask) {
    cv::Mat mat(mask.height(), mask.width(), CV_8UC1);
    for (int r = 0; r < mask.height(); ++r) {
        auto *row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < mask.width(); ++c) {
            row[c] = mask(r, c) ? 255 : 0;
        }
    }
    imwrite_atomic(path, mat);
}

void
write_gray_png(const fs::path &path, const Image<double> &img) {
    cv::Mat mat(img.height(), img.width(), CV_8UC1);
    for (int r = 0; r < img.height(); ++r) {
        auto *row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.width(); ++c) {
            row[c] = to_u8(img(r, c));
        }
    }
    imwrite_atomic(path, mat);
}

LabelImage
read_label_png(const fs::path &path) {
    cv::Mat mat = imread_checked(path, cv::IMREAD_UNCHANGED);
    if (mat.channels() != 1) {
        throw Error(ErrorCode::Validation, path.string() + ": segment map must be single-channel");
    }
    cv::Mat u16;
    mat.convertTo(u16, CV_16U);
    LabelImage out(u16.cols, u16.rows);
    for (int r = 0; r < u16.rows; ++r) {
        const auto *row = u16.ptr<std::uint16_t>(r);
        std::copy(row, row + u16.cols, &out(r, 0));
    }
    return out;
}

void
write_label_png(const fs::path &path, const LabelImage &labels) {
    cv::Mat mat(labels.height(), labels.width(), CV_16UC1);
    for (int r = 0; r < labels.height(); ++r) {
        std::copy(&labels(r, 0), &labels(r, 0) + labels.width(), mat.ptr<std::uint16_t>(r));
    }
    imwrite_atomic(path, mat);
}

std::map<int, std::string>
read_label_json(const fs::path &path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Validation, path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw Error(ErrorCode::Validation, path.string() + ": label map must be a JSON object {id: label}");
    }
    std::map<int, std::string> labels;
    for (const auto &[key, value] : doc.items()) {
        if (!value.is_string()) {
            throw Error(ErrorCode::Validation, path.string() + ": label for id " + key + " is not a string");
        }
        try {
            labels[std::stoi(key)] = value.get<std::string>();
        } catch (const std::exception &) {
            throw Error(ErrorCode::Validation, path.string() + ": non-integer id \"" + key + "\"");
        }
    }
    return labels;
}

SegmentMap
read_segment_map(const fs::path &png, const fs::path &labels_json) {
    SegmentMap seg{read_label_png(png), read_label_json(labels_json)};
    seg.validate();
    return seg;
}

DepthMap
read_pfm(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::string magic;
    int width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    in.get();
    if (magic != "Pf" || width <= 0 || height <= 0 || scale == 0.0) {
        throw Error(ErrorCode::Validation, path.string() + ": not a single-channel PFM file");
    }
    const bool little = scale < 0.0;
    DepthMap out(width, height);
    std::vector<std::uint32_t> row(static_cast<std::size_t>(width));
    for (int r = height - 1; r >= 0; --r) {
        in.read(reinterpret_cast<char *>(row.data()), static_cast<std::streamsize>(row.size() * 4));
        if (!in) {
            throw Error(ErrorCode::Validation, path.string() + ": truncated PFM payload");
        }
        for (int c = 0; c < width; ++c) {
            std::uint32_t bits = row[c];
            if (little != (std::endian::native == std::endian::little)) {
                bits = __builtin_bswap32(bits);
            }
            out(r, c) = std::bit_cast<float>(bits);
        }
    }
    return out;
}

void
write_pfm(const fs::path &path, const DepthMap &depth) {
    std::ostringstream header;
    header << "Pf\n" << depth.width() << " " << depth.height() << "\n-1.0\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> bytes(h.begin(), h.end());
    bytes.reserve(bytes.size() + depth.size() * 4);
    for (int r = depth.height() - 1; r >= 0; --r) {
        for (int c = 0; c < depth.width(); ++c) {
            std::uint32_t bits = std::bit_cast<std::uint32_t>(depth(r, c));
            if constexpr (std::endian::native != std::endian::little) {
                bits = __builtin_bswap32(bits);
            }
            for (int k = 0; k < 4; ++k) {
                bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
            }
        }
    }
    write_bytes_atomic(path, bytes);
}

DepthMap
read_depth(const fs::path &path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pfm") {
        return read_pfm(path);
    }
    if (ext != ".png") {
        throw Error(ErrorCode::Validation, path.string() + ": depth must be .pfm or 16-bit .png");
    }
    fs::path sidecar = fs::path(path).replace_extension(".json");
    if (!fs::exists(sidecar)) {
        sidecar = path.string() + ".json";
    }
    if (!fs::exists(sidecar)) {
        throw Error(ErrorCode::Validation, path.string() + ": PNG depth needs a {scale_m_per_unit} JSON sidecar");
    }
    const auto doc = nlohmann::json::parse(read_text(sidecar));
    if (!doc.contains("scale_m_per_unit") || !doc.at("scale_m_per_unit").is_number()) {
        throw Error(ErrorCode::Validation, sidecar.string() + ": missing numeric scale_m_per_unit");
    }
    const double scale = doc.at("scale_m_per_unit").get<double>();
    cv::Mat mat = imread_checked(path, cv::IMREAD_UNCHANGED);
    if (mat.channels() != 1 || mat.depth() != CV_16U) {
        throw Error(ErrorCode::Validation, path.string() + ": PNG depth must be single-channel 16-bit");
    }
    DepthMap out(mat.cols, mat.rows);
    for (int r = 0; r < mat.rows; ++r) {
        const auto *row = mat.ptr<std::uint16_t>(r);
        for (int c = 0; c < mat.cols; ++c) {
            out(r, c) = static_cast<float>(row[c] * scale);
        }
    }
    return out;
}

Panorama
resize_bilinear(const Panorama &img, int width, int height) {
    cv::Mat src(img.height(), img.width(), CV_32FC3);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            src.at<cv::Vec3f>(r, c) = cv::Vec3f(img(r, c).x(), img(r, c).y(), img(r, c).z());
        }
    }
    cv::Mat dst;
    const bool shrinking = width < img.width() || height < img.height();
    cv::resize(src, dst, cv::Size(width, height), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
    Panorama out(width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const auto &p = dst.at<cv::Vec3f>(r, c);
            out(r, c)     = Rgb(std::clamp(p[0], 0.0f, 1.0f), std::clamp(p[1], 0.0f, 1.0f), std::clamp(p[2], 0.0f, 1.0f));
        }
    }
    return out;
}

namespace {

template <typename T>
Image<T>
resize_nearest_impl(const Image<T> &img, int width, int height) {
    Image<T> out(width, height);
    for (int r = 0; r < height; ++r) {
        const int sr = std::min(img.height() - 1, static_cast<int>((r + 0.5) * img.height() / height));
        for (int c = 0; c < width; ++c) {
            const int sc = std::min(img.width() - 1, static_cast<int>((c + 0.5) * img.width() / width));
            out(r, c)    = img(sr, sc);
        }
    }
    return out;
}

} // namespace

LabelImage
resize_nearest(const LabelImage &img, int width, int height) {
    return resize_nearest_impl(img, width, height);
}

DepthMap
resize_nearest(const DepthMap &img, int width, int height) {
    return resize_nearest_impl(img, width, height);
}

void
write_bytes_atomic(const fs::path &path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    const fs::path tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + path.string());
        }
    }
    fs::rename(tmp, path);
}

void
write_text_atomic(const fs::path &path, const std::string &text) {
    write_bytes_atomic(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

std::string
read_text(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t>
read_bytes(const fs::path &path) {
    const std::string s = read_text(path);
    return {s.begin(), s.end()};
}

} // namespace panolayers
