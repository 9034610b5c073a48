#pragma once

// Binary PGM ("P5") reader/writer per the netpbm definition. Samples are
// 1 byte for maxval <= 255 and 2 bytes big-endian otherwise. Masks use the
// convention 0 = background, any nonzero sample = foreground.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"

namespace radiomap {

namespace detail {

struct PgmCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    std::uint8_t peek() const { return bytes[pos]; }

    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    }

    // Whitespace and '#' comments separate header tokens.
    void skip_separators() {
        while (!eof()) {
            if (is_space(peek())) {
                ++pos;
            } else if (peek() == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::uint32_t read_uint(const char* field) {
        skip_separators();
        if (eof())
            throw ParseError(std::string("missing PGM ") + field, pos);
        if (peek() < '0' || peek() > '9')
            throw ParseError(std::string("invalid PGM ") + field, pos);
        std::uint64_t v = 0;
        while (!eof() && peek() >= '0' && peek() <= '9') {
            v = v * 10 + (peek() - '0');
            if (v > 0xFFFFFFFFull)
                throw ParseError(std::string("PGM ") + field + " overflows", pos);
            ++pos;
        }
        return std::uint32_t(v);
    }
};

} // namespace detail

inline GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2)
        throw ParseError("truncated PGM header", 0);
    if (bytes[0] != 'P' || bytes[1] != '5') {
        std::string magic(reinterpret_cast<const char*>(bytes.data()), 2);
        throw ParseError("unsupported magic \"" + magic + "\" (expected P5)", 0);
    }

    detail::PgmCursor cur{bytes, 2};
    const std::uint32_t width = cur.read_uint("width");
    const std::uint32_t height = cur.read_uint("height");
    const std::uint32_t maxval = cur.read_uint("maxval");
    if (width < 1 || height < 1)
        throw ParseError("PGM dimensions must be >= 1", cur.pos);
    if (maxval < 1 || maxval > 65535)
        throw ParseError("PGM maxval out of range [1, 65535]", cur.pos);

    // Exactly one whitespace byte separates the header from the payload.
    if (cur.eof() || !detail::PgmCursor::is_space(cur.peek()))
        throw ParseError("missing separator before PGM payload", cur.pos);
    ++cur.pos;

    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::uint64_t needed = std::uint64_t(width) * height * bytes_per_sample;
    if (bytes.size() - cur.pos < needed)
        throw ParseError("truncated PGM payload", bytes.size());

    GrayImage img;
    img.width = int(width);
    img.height = int(height);
    img.values.resize(std::size_t(width) * height);
    const std::uint8_t* p = bytes.data() + cur.pos;
    if (bytes_per_sample == 1) {
        for (std::size_t i = 0; i < img.values.size(); ++i)
            img.values[i] = double(p[i]);
    } else {
        for (std::size_t i = 0; i < img.values.size(); ++i)
            img.values[i] = double((std::uint32_t(p[2 * i]) << 8) | p[2 * i + 1]);
    }
    return img;
}

// Values must already be integers in [0, maxval]; nothing is rescaled here.
inline std::vector<std::uint8_t> save_pgm(const GrayImage& img, std::uint32_t maxval = 255) {
    check_dims(img, "save_pgm");
    if (maxval < 1 || maxval > 65535)
        throw InvalidArgument("PGM maxval out of range [1, 65535]");
    for (double v : img.values) {
        if (!(v >= 0.0 && v <= double(maxval)) || v != std::floor(v))
            throw InvalidArgument("save_pgm: values must be integers in [0, maxval]");
    }

    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (maxval > 255) {
        out.reserve(out.size() + img.values.size() * 2);
        for (double v : img.values) {
            auto s = std::uint32_t(v);
            out.push_back(std::uint8_t(s >> 8));
            out.push_back(std::uint8_t(s & 0xFF));
        }
    } else {
        out.reserve(out.size() + img.values.size());
        for (double v : img.values)
            out.push_back(std::uint8_t(std::uint32_t(v)));
    }
    return out;
}

inline BinaryMask load_mask_pgm(std::span<const std::uint8_t> bytes) {
    GrayImage img = load_pgm(bytes);
    BinaryMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.values.resize(img.values.size());
    for (std::size_t i = 0; i < img.values.size(); ++i)
        mask.values[i] = img.values[i] != 0.0 ? 1 : 0;
    return mask;
}

inline std::vector<std::uint8_t> save_mask_pgm(const BinaryMask& mask) {
    check_dims(mask, "save_mask_pgm");
    GrayImage img;
    img.width = mask.width;
    img.height = mask.height;
    img.values.resize(mask.values.size());
    for (std::size_t i = 0; i < mask.values.size(); ++i)
        img.values[i] = mask.values[i] ? 255.0 : 0.0;
    return save_pgm(img, 255);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure: " + path.string());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out)
        throw IoError("write failure: " + path.string());
}

} // namespace radiomap
