#pragma once

// Windowed gray-level co-occurrence matrices and the Rényi-entropy map.
//
// Per pixel, one combined 256x256 GLCM is accumulated over all
// (distance, direction) offsets inside the reflect-padded (2s+1)x(2s+1)
// window; both endpoints of a pair must lie in the window. Accumulation is
// symmetric: each geometric pair increments [a][b] and [b][a]. The map value
// is H_a = (1-a)^-1 * ln( sum f^a ) with f = counts / total over the combined
// matrix.
//
// re_map_naive rebuilds the matrix per window. re_map_fast slides the window
// one pixel at a time, removing pairs that exit and adding pairs that enter,
// and keeps S = sum counts^a up to date through a precomputed power table
// plus a sparse ledger of nonzero cells. Because the reflect-padded window
// always holds the same number of pair slots, the normalizer is a constant
// and H falls out of S in O(1) per pixel.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"
#include "radiomap/parallel.hpp"

namespace radiomap {

struct Glcm {
    std::vector<std::uint32_t> counts; // 256*256, row-major [a*256 + b]
    std::uint64_t total = 0;

    Glcm() : counts(256 * 256, 0) {}

    std::uint32_t at(int a, int b) const { return counts[std::size_t(a) * 256 + b]; }

    // Symmetric accumulation: one geometric pair feeds both [a][b] and [b][a].
    void add_pair(int a, int b) {
        ++counts[std::size_t(a) * 256 + b];
        ++counts[std::size_t(b) * 256 + a];
        total += 2;
    }

    double normalized(int a, int b) const {
        return total == 0 ? 0.0 : double(at(a, b)) / double(total);
    }
};

enum class GlcmDirection { east, north_east, north, north_west };

struct GlcmParams {
    int half_size = 5;  // s; window side is 2s+1
    double alpha = 7.0; // Renyi order, > 0 and != 1
    std::vector<int> distances = {1, 2};
    std::vector<GlcmDirection> directions = {GlcmDirection::east, GlcmDirection::north_east,
                                             GlcmDirection::north, GlcmDirection::north_west};

    int window_side() const { return 2 * half_size + 1; }

    void validate() const {
        if (half_size < 1)
            throw InvalidArgument("GlcmParams: half_size must be >= 1");
        if (!(alpha > 0.0) || alpha == 1.0)
            throw InvalidArgument("GlcmParams: alpha must be > 0 and != 1");
        if (distances.empty())
            throw InvalidArgument("GlcmParams: at least one distance required");
        for (int d : distances)
            if (d != 1 && d != 2)
                throw InvalidArgument("GlcmParams: distances must be within {1, 2}");
        if (directions.empty())
            throw InvalidArgument("GlcmParams: at least one direction required");
        for (std::size_t i = 0; i < directions.size(); ++i)
            for (std::size_t j = i + 1; j < directions.size(); ++j)
                if (directions[i] == directions[j])
                    throw InvalidArgument("GlcmParams: duplicate direction");
        for (std::size_t i = 0; i < distances.size(); ++i)
            for (std::size_t j = i + 1; j < distances.size(); ++j)
                if (distances[i] == distances[j])
                    throw InvalidArgument("GlcmParams: duplicate distance");
    }
};

struct PixelOffset {
    int dx = 0;
    int dy = 0;
};

inline PixelOffset glcm_offset(GlcmDirection dir, int distance) {
    switch (dir) {
        case GlcmDirection::east: return {distance, 0};
        case GlcmDirection::north_east: return {distance, -distance};
        case GlcmDirection::north: return {0, -distance};
        case GlcmDirection::north_west: return {-distance, -distance};
    }
    throw InvalidArgument("unknown GLCM direction");
}

inline std::vector<PixelOffset> glcm_offsets(const GlcmParams& p) {
    std::vector<PixelOffset> offsets;
    offsets.reserve(p.distances.size() * p.directions.size());
    for (int d : p.distances)
        for (GlcmDirection dir : p.directions)
            offsets.push_back(glcm_offset(dir, d));
    return offsets;
}

// Number of symmetric counts a full window contributes: every offset has
// (side-|dx|)*(side-|dy|) in-window pair slots, each counted twice.
inline std::uint64_t glcm_pair_total(const GlcmParams& p) {
    const int side = p.window_side();
    std::uint64_t slots = 0;
    for (const auto& off : glcm_offsets(p)) {
        if (std::abs(off.dx) >= side || std::abs(off.dy) >= side) continue;
        slots += std::uint64_t(side - std::abs(off.dx)) * std::uint64_t(side - std::abs(off.dy));
    }
    return 2 * slots;
}

inline Glcm window_glcm(const QuantizedImage& img, int center_x, int center_y,
                        const GlcmParams& p) {
    p.validate();
    check_dims(img, "window_glcm");

    const int s = p.half_size;
    Glcm g;
    for (const auto& off : glcm_offsets(p)) {
        const int x_lo = center_x - s + std::max(0, -off.dx);
        const int x_hi = center_x + s - std::max(0, off.dx);
        const int y_lo = center_y - s + std::max(0, -off.dy);
        const int y_hi = center_y + s - std::max(0, off.dy);
        for (int y = y_lo; y <= y_hi; ++y) {
            const int ry = reflect_index(y, img.height);
            const int rpy = reflect_index(y + off.dy, img.height);
            for (int x = x_lo; x <= x_hi; ++x) {
                const int a = img.at(reflect_index(x, img.width), ry);
                const int b = img.at(reflect_index(x + off.dx, img.width), rpy);
                g.add_pair(a, b);
            }
        }
    }
    return g;
}

// H_a = (1-a)^-1 * ln( sum_{k,l} f_{k,l}^a ), natural log, zero cells skipped.
inline double renyi_entropy(const Glcm& g, double alpha) {
    if (g.total == 0)
        throw InvalidArgument("renyi_entropy: empty GLCM");
    if (!(alpha > 0.0) || alpha == 1.0)
        throw InvalidArgument("renyi_entropy: alpha must be > 0 and != 1");
    const double total = double(g.total);
    double sum = 0.0;
    for (std::uint32_t c : g.counts)
        if (c != 0) sum += std::pow(double(c) / total, alpha);
    return std::log(sum) / (1.0 - alpha);
}

namespace detail {

// counts^alpha for every count a window cell can reach (0 .. pair total).
inline std::vector<double> build_pow_table(std::uint64_t max_count, double alpha) {
    std::vector<double> table(std::size_t(max_count) + 1);
    for (std::size_t c = 0; c < table.size(); ++c)
        table[c] = std::pow(double(c), alpha);
    return table;
}

// Scratch GLCM for one worker: dense counts plus the list of touched cells so
// clearing costs only what the window used.
struct GlcmScratch {
    std::vector<std::int32_t> counts = std::vector<std::int32_t>(256 * 256, 0);
    std::vector<std::uint32_t> touched;

    void add(int a, int b) {
        bump(std::uint32_t(a) * 256 + std::uint32_t(b));
        bump(std::uint32_t(b) * 256 + std::uint32_t(a));
    }
    void bump(std::uint32_t cell) {
        if (counts[cell]++ == 0) touched.push_back(cell);
    }
    void clear() {
        for (std::uint32_t cell : touched) counts[cell] = 0;
        touched.clear();
    }
};

inline void accumulate_window(GlcmScratch& scratch, const QuantizedImage& img,
                              int center_x, int center_y, int s,
                              const std::vector<PixelOffset>& offsets) {
    for (const auto& off : offsets) {
        const int x_lo = center_x - s + std::max(0, -off.dx);
        const int x_hi = center_x + s - std::max(0, off.dx);
        const int y_lo = center_y - s + std::max(0, -off.dy);
        const int y_hi = center_y + s - std::max(0, off.dy);
        for (int y = y_lo; y <= y_hi; ++y) {
            const int ry = reflect_index(y, img.height);
            const int rpy = reflect_index(y + off.dy, img.height);
            for (int x = x_lo; x <= x_hi; ++x) {
                const int a = img.at(reflect_index(x, img.width), ry);
                const int b = img.at(reflect_index(x + off.dx, img.width), rpy);
                scratch.add(a, b);
            }
        }
    }
}

} // namespace detail

// Rebuilds the combined window GLCM per pixel (no incremental state); the
// reference the fast path is checked against.
inline FeatureMap re_map_naive(const QuantizedImage& img, const GlcmParams& p, int threads = 1) {
    p.validate();
    check_dims(img, "re_map_naive");

    const int s = p.half_size;
    const auto offsets = glcm_offsets(p);
    const double total = double(glcm_pair_total(p));
    const double inv_one_minus_alpha = 1.0 / (1.0 - p.alpha);
    FeatureMap out = make_feature_map(img.width, img.height);

    parallel_chunks(img.height, threads, [&](int row_begin, int row_end) {
        detail::GlcmScratch scratch;
        for (int y = row_begin; y < row_end; ++y) {
            for (int x = 0; x < img.width; ++x) {
                detail::accumulate_window(scratch, img, x, y, s, offsets);
                double sum = 0.0;
                for (std::uint32_t cell : scratch.touched)
                    sum += std::pow(double(scratch.counts[cell]) / total, p.alpha);
                out.at(x, y) = std::log(sum) * inv_one_minus_alpha;
                scratch.clear();
            }
        }
    });
    return out;
}

namespace detail {

// Sliding-window GLCM with incrementally maintained S = sum counts^alpha.
//
// Removing/adding exact table values keeps each update cheap, but the running
// sum can lose relative accuracy when S later shrinks by orders of magnitude;
// sum_pow is therefore rebuilt from the ledger whenever it drops well below
// the largest value seen since the last rebuild.
struct SlidingGlcm {
    std::vector<std::int32_t> counts = std::vector<std::int32_t>(256 * 256, 0);
    std::vector<std::uint32_t> ledger;          // cells that may be nonzero
    std::vector<std::uint8_t> in_ledger = std::vector<std::uint8_t>(256 * 256, 0);
    const std::vector<double>* pow_table = nullptr;
    double sum_pow = 0.0;
    double peak = 0.0;

    void bump(std::uint32_t cell, int delta) {
        std::int32_t& c = counts[cell];
        sum_pow -= (*pow_table)[std::size_t(c)];
        c += delta;
        assert(c >= 0);
        sum_pow += (*pow_table)[std::size_t(c)];
        if (c > 0 && !in_ledger[cell]) {
            in_ledger[cell] = 1;
            ledger.push_back(cell);
        }
    }
    void add_pair(int a, int b, int delta) {
        bump(std::uint32_t(a) * 256 + std::uint32_t(b), delta);
        bump(std::uint32_t(b) * 256 + std::uint32_t(a), delta);
    }

    void rebuild_sum() {
        std::size_t keep = 0;
        double sum = 0.0;
        for (std::uint32_t cell : ledger) {
            if (counts[cell] > 0) {
                ledger[keep++] = cell;
                sum += (*pow_table)[std::size_t(counts[cell])];
            } else {
                in_ledger[cell] = 0;
            }
        }
        ledger.resize(keep);
        sum_pow = sum;
        peak = sum;
    }

    // Rebuild once S decays below 5% of its post-rebuild peak; keeps rounding
    // carried over from large-magnitude updates out of small sums.
    void maybe_rebuild() {
        peak = std::max(peak, sum_pow);
        if (sum_pow < 0.05 * peak || ledger.size() > counts.size() / 4) rebuild_sum();
    }

    void reset() {
        for (std::uint32_t cell : ledger) {
            counts[cell] = 0;
            in_ledger[cell] = 0;
        }
        ledger.clear();
        sum_pow = 0.0;
        peak = 0.0;
    }
};

} // namespace detail

// Equal to re_map_naive within 1e-9 relative. Row-parallel when threads > 1
// with output independent of the thread count.
inline FeatureMap re_map_fast(const QuantizedImage& img, const GlcmParams& p, int threads = 1) {
    p.validate();
    check_dims(img, "re_map_fast");

    const int s = p.half_size;
    const auto offsets = glcm_offsets(p);
    const std::uint64_t pair_total = glcm_pair_total(p);
    const auto pow_table = detail::build_pow_table(pair_total, p.alpha);
    const double norm = pow_table[std::size_t(pair_total)]; // total^alpha
    const double inv_one_minus_alpha = 1.0 / (1.0 - p.alpha);
    FeatureMap out = make_feature_map(img.width, img.height);

    parallel_chunks(img.height, threads, [&](int row_begin, int row_end) {
        detail::SlidingGlcm win;
        win.pow_table = &pow_table;
        for (int y = row_begin; y < row_end; ++y) {
            win.reset();

            // Full build at the row start, then slide one column at a time.
            for (const auto& off : offsets) {
                const int x_lo = -s + std::max(0, -off.dx);
                const int x_hi = s - std::max(0, off.dx);
                const int y_lo = y - s + std::max(0, -off.dy);
                const int y_hi = y + s - std::max(0, off.dy);
                for (int wy = y_lo; wy <= y_hi; ++wy) {
                    const int ry = reflect_index(wy, img.height);
                    const int rpy = reflect_index(wy + off.dy, img.height);
                    for (int wx = x_lo; wx <= x_hi; ++wx) {
                        const int a = img.at(reflect_index(wx, img.width), ry);
                        const int b = img.at(reflect_index(wx + off.dx, img.width), rpy);
                        win.add_pair(a, b, +1);
                    }
                }
            }
            win.peak = win.sum_pow;
            out.at(0, y) = std::log(win.sum_pow / norm) * inv_one_minus_alpha;

            for (int x = 1; x < img.width; ++x) {
                // Window columns move from [x-1-s, x-1+s] to [x-s, x+s]. Per
                // offset the valid pair starts shift by one: exactly one
                // start position leaves and one enters.
                for (const auto& off : offsets) {
                    const int y_lo = y - s + std::max(0, -off.dy);
                    const int y_hi = y + s - std::max(0, off.dy);
                    const int out_x = x - 1 - s + std::max(0, -off.dx); // departing start
                    const int in_x = x + s - std::max(0, off.dx);       // entering start
                    const int rox = reflect_index(out_x, img.width);
                    const int roxp = reflect_index(out_x + off.dx, img.width);
                    const int rix = reflect_index(in_x, img.width);
                    const int rixp = reflect_index(in_x + off.dx, img.width);
                    for (int wy = y_lo; wy <= y_hi; ++wy) {
                        const int ry = reflect_index(wy, img.height);
                        const int rpy = reflect_index(wy + off.dy, img.height);
                        win.add_pair(img.at(rox, ry), img.at(roxp, rpy), -1);
                        win.add_pair(img.at(rix, ry), img.at(rixp, rpy), +1);
                    }
                }
                win.maybe_rebuild();
                out.at(x, y) = std::log(win.sum_pow / norm) * inv_one_minus_alpha;
            }
        }
    });
    return out;
}

} // namespace radiomap
