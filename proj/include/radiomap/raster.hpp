#pragma once

// Planar float raster with JSON sidecar: <stem>.bin holds little-endian
// 4-byte floats, channel-major then row-major; <stem>.json describes it as
// {"width", "height", "channels": [names], "dtype": "f32le"}.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"
#include "radiomap/pgm.hpp" // read_file_bytes / write_file_bytes

namespace radiomap {

namespace detail {

inline void check_channels(std::span<const NamedMap> channels) {
    if (channels.empty())
        throw InvalidArgument("raster: at least one channel required");
    const int w = channels.front().map.width;
    const int h = channels.front().map.height;
    for (const auto& ch : channels) {
        check_dims(ch.map, "raster channel");
        if (ch.name.empty())
            throw InvalidArgument("raster: empty channel name");
        if (ch.map.width != w || ch.map.height != h)
            throw InvalidArgument("raster: channel dimension mismatch");
        for (const auto& other : channels)
            if (&other != &ch && other.name == ch.name)
                throw InvalidArgument("raster: duplicate channel name \"" + ch.name + "\"");
    }
}

} // namespace detail

inline std::vector<std::uint8_t> encode_raster_payload(std::span<const NamedMap> channels) {
    detail::check_channels(channels);
    std::vector<std::uint8_t> out;
    out.reserve(channels.size() * channels.front().map.size() * 4);
    for (const auto& ch : channels) {
        for (double v : ch.map.values) {
            const auto bits = std::bit_cast<std::uint32_t>(float(v));
            out.push_back(std::uint8_t(bits & 0xFF));
            out.push_back(std::uint8_t((bits >> 8) & 0xFF));
            out.push_back(std::uint8_t((bits >> 16) & 0xFF));
            out.push_back(std::uint8_t((bits >> 24) & 0xFF));
        }
    }
    return out;
}

inline std::string make_raster_sidecar(std::span<const NamedMap> channels) {
    detail::check_channels(channels);
    nlohmann::json j;
    j["width"] = channels.front().map.width;
    j["height"] = channels.front().map.height;
    j["channels"] = nlohmann::json::array();
    for (const auto& ch : channels) j["channels"].push_back(ch.name);
    j["dtype"] = "f32le";
    return j.dump();
}

inline std::vector<NamedMap> decode_raster(std::span<const std::uint8_t> payload,
                                           const std::string& sidecar_json) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sidecar_json);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("raster sidecar is not valid JSON: ") + e.what(), 0);
    }
    if (!j.contains("width") || !j.contains("height") || !j.contains("channels") ||
        !j.contains("dtype") || !j["width"].is_number_integer() ||
        !j["height"].is_number_integer() || !j["channels"].is_array())
        throw ParseError("raster sidecar missing required fields", 0);
    if (j["dtype"] != "f32le")
        throw ParseError("raster sidecar: unsupported dtype", 0);

    const int w = j["width"].get<int>();
    const int h = j["height"].get<int>();
    if (w < 1 || h < 1)
        throw ParseError("raster sidecar: dimensions must be >= 1", 0);
    const auto& names = j["channels"];
    if (names.empty())
        throw ParseError("raster sidecar: no channels", 0);

    const std::size_t plane = std::size_t(w) * h;
    if (payload.size() != plane * names.size() * 4)
        throw ParseError("raster payload size does not match sidecar", payload.size());

    std::vector<NamedMap> channels;
    channels.reserve(names.size());
    std::size_t off = 0;
    for (const auto& name : names) {
        if (!name.is_string())
            throw ParseError("raster sidecar: channel names must be strings", 0);
        NamedMap ch;
        ch.name = name.get<std::string>();
        ch.map.width = w;
        ch.map.height = h;
        ch.map.values.resize(plane);
        for (std::size_t i = 0; i < plane; ++i, off += 4) {
            const std::uint32_t bits = std::uint32_t(payload[off]) |
                                       (std::uint32_t(payload[off + 1]) << 8) |
                                       (std::uint32_t(payload[off + 2]) << 16) |
                                       (std::uint32_t(payload[off + 3]) << 24);
            ch.map.values[i] = double(std::bit_cast<float>(bits));
        }
        channels.push_back(std::move(ch));
    }
    return channels;
}

inline void save_raster(const std::filesystem::path& stem, std::span<const NamedMap> channels) {
    const auto payload = encode_raster_payload(channels);
    const auto sidecar = make_raster_sidecar(channels);
    auto bin = stem; bin += ".bin";
    auto json = stem; json += ".json";
    write_file_bytes(bin, payload);
    write_file_bytes(json, std::span<const std::uint8_t>(
                               reinterpret_cast<const std::uint8_t*>(sidecar.data()),
                               sidecar.size()));
}

inline void save_raster(const std::filesystem::path& stem, const FeatureMap& map,
                        const std::string& name) {
    const NamedMap ch{name, map};
    save_raster(stem, std::span<const NamedMap>(&ch, 1));
}

inline std::vector<NamedMap> load_raster(const std::filesystem::path& stem) {
    auto bin = stem; bin += ".bin";
    auto json = stem; json += ".json";
    const auto payload = read_file_bytes(bin);
    const auto sidecar_bytes = read_file_bytes(json);
    const std::string sidecar(sidecar_bytes.begin(), sidecar_bytes.end());
    return decode_raster(payload, sidecar);
}

} // namespace radiomap
