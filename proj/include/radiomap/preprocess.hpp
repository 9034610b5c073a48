#pragma once

// Per-slice preprocessing: min-max normalization, 256-level quantization, and
// resizing (bilinear for images, nearest-neighbor for masks so lesion
// boundaries stay sharp).

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"

namespace radiomap {

// (v - min) / (max - min) per pixel. A constant slice maps to all zeros
// rather than NaN; such slices carry no signal anyway.
inline GrayImage minmax_normalize(const GrayImage& img) {
    check_finite(img, "minmax_normalize");
    const auto [lo_it, hi_it] = std::minmax_element(img.values.begin(), img.values.end());
    const double lo = *lo_it, hi = *hi_it;
    GrayImage out = img;
    if (hi == lo) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    const double range = hi - lo;
    for (double& v : out.values) v = (v - lo) / range;
    return out;
}

// level = round(v * 255), round-half-up. Input must already be in [0, 1].
inline QuantizedImage quantize(const GrayImage& img) {
    check_dims(img, "quantize");
    QuantizedImage out;
    out.width = img.width;
    out.height = img.height;
    out.levels.resize(img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        const double v = img.values[i];
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("quantize: value outside [0, 1]");
        out.levels[i] = std::uint8_t(std::floor(v * 255.0 + 0.5));
    }
    return out;
}

enum class ResizeMode { nearest, bilinear };

namespace detail {

// Nearest source pixel center under the half-pixel grid mapping; ties go to
// the smaller index.
inline int nearest_source_index(int dst, int dst_size, int src_size) {
    const double src = (dst + 0.5) * double(src_size) / double(dst_size) - 0.5;
    const int idx = int(std::ceil(src - 0.5));
    return std::clamp(idx, 0, src_size - 1);
}

// Corner-aligned source coordinate; a single output pixel maps to the center.
inline double aligned_source_coord(int dst, int dst_size, int src_size) {
    if (dst_size == 1) return (src_size - 1) / 2.0;
    return dst * double(src_size - 1) / double(dst_size - 1);
}

} // namespace detail

inline GrayImage resize(const GrayImage& img, int target_w, int target_h, ResizeMode mode) {
    check_dims(img, "resize");
    if (target_w < 1 || target_h < 1)
        throw InvalidArgument("resize: target dimensions must be >= 1");
    if (target_w == img.width && target_h == img.height)
        return img;

    GrayImage out;
    out.width = target_w;
    out.height = target_h;
    out.spacing = img.spacing;
    out.values.resize(std::size_t(target_w) * target_h);

    if (mode == ResizeMode::nearest) {
        for (int y = 0; y < target_h; ++y) {
            const int sy = detail::nearest_source_index(y, target_h, img.height);
            for (int x = 0; x < target_w; ++x) {
                const int sx = detail::nearest_source_index(x, target_w, img.width);
                out.at(x, y) = img.at(sx, sy);
            }
        }
        return out;
    }

    for (int y = 0; y < target_h; ++y) {
        const double sy = detail::aligned_source_coord(y, target_h, img.height);
        const int y0 = std::clamp(int(std::floor(sy)), 0, img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double ty = sy - y0;
        for (int x = 0; x < target_w; ++x) {
            const double sx = detail::aligned_source_coord(x, target_w, img.width);
            const int x0 = std::clamp(int(std::floor(sx)), 0, img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double tx = sx - x0;
            const double top = img.at(x0, y0) * (1.0 - tx) + img.at(x1, y0) * tx;
            const double bot = img.at(x0, y1) * (1.0 - tx) + img.at(x1, y1) * tx;
            out.at(x, y) = top * (1.0 - ty) + bot * ty;
        }
    }
    return out;
}

// Masks are always resized nearest-neighbor, so the output stays binary.
inline BinaryMask resize_mask(const BinaryMask& mask, int target_w, int target_h) {
    check_dims(mask, "resize_mask");
    if (target_w < 1 || target_h < 1)
        throw InvalidArgument("resize_mask: target dimensions must be >= 1");

    BinaryMask out;
    out.width = target_w;
    out.height = target_h;
    out.values.resize(std::size_t(target_w) * target_h);
    for (int y = 0; y < target_h; ++y) {
        const int sy = detail::nearest_source_index(y, target_h, mask.height);
        for (int x = 0; x < target_w; ++x) {
            const int sx = detail::nearest_source_index(x, target_w, mask.width);
            out.at(x, y) = mask.at(sx, sy);
        }
    }
    return out;
}

} // namespace radiomap
