#pragma once

// Early data fusion: the raw (normalized) channel concatenated with feature
// maps into one multi-channel stack, exported through the raster format so
// downstream trainers can index channels by position.

#include <algorithm>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"
#include "radiomap/raster.hpp"

namespace radiomap {

struct FusedStack {
    std::vector<NamedMap> channels; // [raw, then features in build order]
    int width = 0;
    int height = 0;
};

inline FeatureMap minmax_normalize_map(const FeatureMap& map) {
    const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
    FeatureMap out = map;
    if (*hi_it == *lo_it) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    const double lo = *lo_it, range = *hi_it - *lo_it;
    for (double& v : out.values) v = (v - lo) / range;
    return out;
}

// Channel order is [raw, maps...]. The raw channel is named "flair" and must
// already be normalized to [0, 1]. When normalize_features is set, each
// feature channel is independently min-max scaled (constant channels -> 0).
inline FusedStack build_stack(const GrayImage& raw, std::span<const NamedMap> maps,
                              bool normalize_features = true) {
    check_finite(raw, "build_stack raw channel");
    for (double v : raw.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw InvalidArgument("build_stack: raw channel must be normalized to [0, 1]");

    FusedStack stack;
    stack.width = raw.width;
    stack.height = raw.height;

    NamedMap raw_channel;
    raw_channel.name = "flair";
    raw_channel.map.width = raw.width;
    raw_channel.map.height = raw.height;
    raw_channel.map.values = raw.values;
    stack.channels.push_back(std::move(raw_channel));

    for (const auto& m : maps) {
        check_dims(m.map, "build_stack feature channel");
        if (m.map.width != raw.width || m.map.height != raw.height)
            throw InvalidArgument("build_stack: dimension mismatch for channel \"" + m.name + "\"");
        for (const auto& existing : stack.channels)
            if (existing.name == m.name)
                throw InvalidArgument("build_stack: duplicate channel name \"" + m.name + "\"");
        NamedMap ch;
        ch.name = m.name;
        ch.map = normalize_features ? minmax_normalize_map(m.map) : m.map;
        stack.channels.push_back(std::move(ch));
    }
    return stack;
}

inline void export_stack(const FusedStack& stack, const std::filesystem::path& stem) {
    save_raster(stem, stack.channels);
}

} // namespace radiomap
