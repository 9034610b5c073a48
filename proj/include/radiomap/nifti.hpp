#pragma once

// Minimal uncompressed NIfTI-1 reader/writer: single-file "n+1" layout,
// little-endian, datatypes uint8/int16/uint16/float32. Header fields consumed:
// dim[0..3], datatype, bitpix, vox_offset, scl_slope, scl_inter, pixdim[1..3],
// magic. No orientation handling; slicing is axial only.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <utility>
#include <vector>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"

namespace radiomap {

enum class NiftiDatatype : std::uint16_t {
    u8 = 2,
    i16 = 4,
    f32 = 16,
    u16 = 512,
};

inline int nifti_bitpix(NiftiDatatype dt) {
    switch (dt) {
        case NiftiDatatype::u8: return 8;
        case NiftiDatatype::i16: return 16;
        case NiftiDatatype::f32: return 32;
        case NiftiDatatype::u16: return 16;
    }
    throw InvalidArgument("unsupported NIfTI datatype code");
}

struct VolumeMeta {
    std::array<int, 3> dims{1, 1, 1}; // nx, ny, nz
    NiftiDatatype datatype = NiftiDatatype::f32;
    float slope = 1.0f;     // scl_slope; 0 is treated as 1 when loading
    float intercept = 0.0f; // scl_inter
    std::array<float, 3> voxel_size_mm{1.0f, 1.0f, 1.0f};
};

enum class SliceAxis { axial };

namespace detail {

inline void put_u16le(std::vector<std::uint8_t>& b, std::size_t off, std::uint16_t v) {
    b[off] = std::uint8_t(v & 0xFF);
    b[off + 1] = std::uint8_t(v >> 8);
}
inline void put_u32le(std::vector<std::uint8_t>& b, std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[off + i] = std::uint8_t((v >> (8 * i)) & 0xFF);
}
inline void put_f32le(std::vector<std::uint8_t>& b, std::size_t off, float v) {
    put_u32le(b, off, std::bit_cast<std::uint32_t>(v));
}
inline std::uint16_t get_u16le(std::span<const std::uint8_t> b, std::size_t off) {
    return std::uint16_t(b[off] | (std::uint16_t(b[off + 1]) << 8));
}
inline std::int16_t get_i16le(std::span<const std::uint8_t> b, std::size_t off) {
    return std::bit_cast<std::int16_t>(get_u16le(b, off));
}
inline std::uint32_t get_u32le(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[off + i]) << (8 * i);
    return v;
}
inline std::int32_t get_i32le(std::span<const std::uint8_t> b, std::size_t off) {
    return std::bit_cast<std::int32_t>(get_u32le(b, off));
}
inline float get_f32le(std::span<const std::uint8_t> b, std::size_t off) {
    return std::bit_cast<float>(get_u32le(b, off));
}

} // namespace detail

// `raw` holds unscaled samples in x-fastest order (x + y*nx + z*nx*ny). For
// integer datatypes every sample must be an in-range integer.
inline std::vector<std::uint8_t> save_nifti(const VolumeMeta& meta,
                                            std::span<const float> raw) {
    const auto [nx, ny, nz] = meta.dims;
    if (nx < 1 || ny < 1 || nz < 1)
        throw InvalidArgument("save_nifti: dims must be >= 1");
    const std::size_t count = std::size_t(nx) * ny * nz;
    if (raw.size() != count)
        throw InvalidArgument("save_nifti: sample count does not match dims");
    const int bitpix = nifti_bitpix(meta.datatype);

    const std::size_t vox_offset = 352; // 348-byte header + 4-byte extender
    std::vector<std::uint8_t> out(vox_offset + count * (bitpix / 8), 0);

    detail::put_u32le(out, 0, 348);                       // sizeof_hdr
    detail::put_u16le(out, 40, 3);                        // dim[0]
    detail::put_u16le(out, 42, std::uint16_t(nx));        // dim[1]
    detail::put_u16le(out, 44, std::uint16_t(ny));        // dim[2]
    detail::put_u16le(out, 46, std::uint16_t(nz));        // dim[3]
    for (int d = 4; d <= 7; ++d) detail::put_u16le(out, 40 + 2 * d, 1);
    detail::put_u16le(out, 70, std::uint16_t(meta.datatype));
    detail::put_u16le(out, 72, std::uint16_t(bitpix));
    detail::put_f32le(out, 76, 1.0f); // pixdim[0]
    for (int d = 0; d < 3; ++d)
        detail::put_f32le(out, 80 + 4 * d, meta.voxel_size_mm[std::size_t(d)]);
    detail::put_f32le(out, 108, float(vox_offset));
    detail::put_f32le(out, 112, meta.slope);
    detail::put_f32le(out, 116, meta.intercept);
    out[344] = 'n'; out[345] = '+'; out[346] = '1'; out[347] = '\0';

    std::size_t off = vox_offset;
    auto require_int = [](float v, double lo, double hi) {
        if (!(double(v) >= lo && double(v) <= hi) || double(v) != std::floor(double(v)))
            throw InvalidArgument("save_nifti: sample not representable in declared datatype");
    };
    switch (meta.datatype) {
        case NiftiDatatype::u8:
            for (float v : raw) { require_int(v, 0, 255); out[off++] = std::uint8_t(v); }
            break;
        case NiftiDatatype::i16:
            for (float v : raw) {
                require_int(v, -32768, 32767);
                detail::put_u16le(out, off, std::bit_cast<std::uint16_t>(std::int16_t(v)));
                off += 2;
            }
            break;
        case NiftiDatatype::u16:
            for (float v : raw) {
                require_int(v, 0, 65535);
                detail::put_u16le(out, off, std::uint16_t(v));
                off += 2;
            }
            break;
        case NiftiDatatype::f32:
            for (float v : raw) { detail::put_f32le(out, off, v); off += 4; }
            break;
    }
    return out;
}

// Returns the axial slice `index` with values mapped through
// value = raw * slope + intercept (slope 0 treated as 1).
inline std::pair<GrayImage, VolumeMeta> load_nifti_slice(std::span<const std::uint8_t> bytes,
                                                         SliceAxis /*axis*/,
                                                         int index) {
    if (bytes.size() < 348)
        throw ParseError("truncated NIfTI-1 header", bytes.size());
    const std::int32_t sizeof_hdr = detail::get_i32le(bytes, 0);
    if (sizeof_hdr != 348)
        throw ParseError("bad sizeof_hdr (not little-endian NIfTI-1?)", 0);

    const char m0 = char(bytes[344]), m1 = char(bytes[345]), m2 = char(bytes[346]);
    if (m0 == 'n' && m1 == 'i' && m2 == '1')
        throw ParseError("unsupported layout (two-file \"ni1\" NIfTI)", 344);
    if (!(m0 == 'n' && m1 == '+' && m2 == '1' && bytes[347] == 0))
        throw ParseError("bad magic (expected \"n+1\")", 344);

    const int ndim = detail::get_i16le(bytes, 40);
    if (ndim < 2 || ndim > 7)
        throw ParseError("unsupported dimensionality", 40);
    const int nx = detail::get_i16le(bytes, 42);
    const int ny = detail::get_i16le(bytes, 44);
    const int nz = ndim >= 3 ? detail::get_i16le(bytes, 46) : 1;
    if (nx < 1 || ny < 1 || nz < 1)
        throw ParseError("non-positive volume dimension", 42);
    for (int d = 4; d <= ndim; ++d)
        if (detail::get_i16le(bytes, 40 + 2 * std::size_t(d)) > 1)
            throw ParseError("4D+ volumes are unsupported", 40 + 2 * std::size_t(d));

    const std::uint16_t dtcode = detail::get_u16le(bytes, 70);
    NiftiDatatype dt;
    switch (dtcode) {
        case 2: dt = NiftiDatatype::u8; break;
        case 4: dt = NiftiDatatype::i16; break;
        case 16: dt = NiftiDatatype::f32; break;
        case 512: dt = NiftiDatatype::u16; break;
        default:
            throw ParseError("unsupported datatype code " + std::to_string(dtcode), 70);
    }
    const int bitpix = detail::get_i16le(bytes, 72);
    if (bitpix != nifti_bitpix(dt))
        throw ParseError("bitpix does not match datatype", 72);

    const float vox_offset_f = detail::get_f32le(bytes, 108);
    if (!(vox_offset_f >= 348.0f) || vox_offset_f != std::floor(vox_offset_f))
        throw ParseError("invalid vox_offset", 108);
    const std::size_t vox_offset = std::size_t(vox_offset_f);
    const std::size_t bytes_per = std::size_t(bitpix) / 8;
    const std::uint64_t payload = std::uint64_t(nx) * ny * nz * bytes_per;
    if (vox_offset > bytes.size() || payload > bytes.size() - vox_offset)
        throw ParseError("vox_offset/payload beyond file length", bytes.size());

    if (index < 0 || index >= nz)
        throw InvalidArgument("slice index out of bounds (nz = " + std::to_string(nz) + ")");

    VolumeMeta meta;
    meta.dims = {nx, ny, nz};
    meta.datatype = dt;
    meta.slope = detail::get_f32le(bytes, 112);
    meta.intercept = detail::get_f32le(bytes, 116);
    for (int d = 0; d < 3; ++d)
        meta.voxel_size_mm[std::size_t(d)] = detail::get_f32le(bytes, 80 + 4 * std::size_t(d));

    const double slope = meta.slope == 0.0f ? 1.0 : double(meta.slope);
    const double inter = double(meta.intercept);

    GrayImage img;
    img.width = nx;
    img.height = ny;
    img.values.resize(std::size_t(nx) * ny);
    img.spacing = PixelSpacing{double(meta.voxel_size_mm[0]), double(meta.voxel_size_mm[1])};

    const std::size_t slice_off = vox_offset + std::size_t(index) * nx * ny * bytes_per;
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        double raw = 0.0;
        const std::size_t off = slice_off + i * bytes_per;
        switch (dt) {
            case NiftiDatatype::u8: raw = double(bytes[off]); break;
            case NiftiDatatype::i16: raw = double(detail::get_i16le(bytes, off)); break;
            case NiftiDatatype::u16: raw = double(detail::get_u16le(bytes, off)); break;
            case NiftiDatatype::f32: raw = double(detail::get_f32le(bytes, off)); break;
        }
        img.values[i] = raw * slope + inter;
    }
    return {std::move(img), meta};
}

} // namespace radiomap
