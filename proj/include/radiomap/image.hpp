#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radiomap/errors.hpp"

namespace radiomap {

struct PixelSpacing {
    double dx = 1.0; // mm
    double dy = 1.0; // mm
};

// Row-major 2D scalar raster. Holds raw or normalized intensities.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::optional<PixelSpacing> spacing;

    double at(int x, int y) const { return values[std::size_t(y) * width + x]; }
    double& at(int x, int y) { return values[std::size_t(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

// 256-level gray image; the domain of both feature extractors.
struct QuantizedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> levels;

    std::uint8_t at(int x, int y) const { return levels[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return levels[std::size_t(y) * width + x]; }
    std::size_t size() const { return levels.size(); }
};

// Real-valued map aligned pixel-for-pixel with its source image.
struct FeatureMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[std::size_t(y) * width + x]; }
    double& at(int x, int y) { return values[std::size_t(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

// Strictly 0/1 segmentation mask.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    std::uint8_t at(int x, int y) const { return values[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return values[std::size_t(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

// A feature map (or image channel) together with the name it is exported under.
struct NamedMap {
    std::string name;
    FeatureMap map;
};

inline GrayImage make_gray_image(int width, int height, double fill = 0.0) {
    if (width < 1 || height < 1)
        throw InvalidArgument("image dimensions must be >= 1");
    GrayImage img;
    img.width = width;
    img.height = height;
    img.values.assign(std::size_t(width) * height, fill);
    return img;
}

inline QuantizedImage make_quantized_image(int width, int height, std::uint8_t fill = 0) {
    if (width < 1 || height < 1)
        throw InvalidArgument("image dimensions must be >= 1");
    QuantizedImage img;
    img.width = width;
    img.height = height;
    img.levels.assign(std::size_t(width) * height, fill);
    return img;
}

inline FeatureMap make_feature_map(int width, int height, double fill = 0.0) {
    if (width < 1 || height < 1)
        throw InvalidArgument("map dimensions must be >= 1");
    FeatureMap map;
    map.width = width;
    map.height = height;
    map.values.assign(std::size_t(width) * height, fill);
    return map;
}

inline BinaryMask make_binary_mask(int width, int height, std::uint8_t fill = 0) {
    if (width < 1 || height < 1)
        throw InvalidArgument("mask dimensions must be >= 1");
    if (fill > 1)
        throw InvalidArgument("mask values must be 0 or 1");
    BinaryMask mask;
    mask.width = width;
    mask.height = height;
    mask.values.assign(std::size_t(width) * height, fill);
    return mask;
}

template <class ImageLike>
void check_dims(const ImageLike& img, const char* what) {
    if (img.width < 1 || img.height < 1)
        throw InvalidArgument(std::string(what) + ": dimensions must be >= 1");
    if (img.size() != std::size_t(img.width) * img.height)
        throw InvalidArgument(std::string(what) + ": value count does not match dimensions");
}

inline void check_finite(const GrayImage& img, const char* what) {
    check_dims(img, what);
    for (double v : img.values)
        if (!std::isfinite(v))
            throw InvalidArgument(std::string(what) + ": non-finite pixel value");
}

// Mirror an out-of-range coordinate back into [0, n). The edge sample is
// repeated ( ... 2 1 0 | 0 1 2 ... ), so a window larger than the image is
// still well defined.
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

} // namespace radiomap
