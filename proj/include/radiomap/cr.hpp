#pragma once

// Concentration rate: per pixel, the sum of the `sum_count` highest window
// intensities after dropping the `drop_count` largest ones (outlier guard).
// With ascending order statistics X_(1) <= ... <= X_(N) over the
// (2s+1)x(2s+1) window, CR = X_(N-num-m+1) + ... + X_(N-m).
//
// cr_map_naive sorts every window; cr_map_fast keeps a two-level (16x16)
// count histogram per row that is updated one column at a time as the window
// slides, then reads the trimmed top-sum by walking bins from 255 downward.
// Both are exact integer computations and agree bit for bit.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"
#include "radiomap/parallel.hpp"

namespace radiomap {

struct CrParams {
    int half_size = 2;  // s; window side is 2s+1
    int sum_count = 15; // num: high-intensity pixels to sum
    int drop_count = 5; // m: highest pixels to exclude as outliers

    int window_side() const { return 2 * half_size + 1; }
    int window_area() const { return window_side() * window_side(); }

    void validate() const {
        if (half_size < 1)
            throw InvalidArgument("CrParams: half_size must be >= 1");
        if (sum_count < 1)
            throw InvalidArgument("CrParams: sum_count must be >= 1");
        if (drop_count < 0)
            throw InvalidArgument("CrParams: drop_count must be >= 0");
        if (sum_count + drop_count > window_area())
            throw InvalidArgument("CrParams: sum_count + drop_count exceeds window area");
    }
};

inline FeatureMap cr_map_naive(const QuantizedImage& img, const CrParams& p) {
    p.validate();
    check_dims(img, "cr_map_naive");

    const int s = p.half_size;
    const int n = p.window_area();
    FeatureMap out = make_feature_map(img.width, img.height);

    std::vector<std::uint8_t> window(static_cast<std::size_t>(n));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::size_t k = 0;
            for (int wy = y - s; wy <= y + s; ++wy) {
                const int ry = reflect_index(wy, img.height);
                for (int wx = x - s; wx <= x + s; ++wx)
                    window[k++] = img.at(reflect_index(wx, img.width), ry);
            }
            std::sort(window.begin(), window.end());
            // ascending ranks [N-num-m+1, N-m], i.e. 0-based [N-num-m, N-m)
            long long sum = 0;
            for (int i = n - p.sum_count - p.drop_count; i < n - p.drop_count; ++i)
                sum += window[std::size_t(i)];
            out.at(x, y) = double(sum);
        }
    }
    return out;
}

namespace detail {

// 256 fine bins grouped under 16 coarse bins; the coarse level also carries
// the value mass so whole bins can be consumed without descending.
struct CrHistogram {
    std::array<std::int32_t, 256> count{};
    std::array<std::int32_t, 16> coarse_count{};
    std::array<std::int64_t, 16> coarse_sum{};

    void add(int v) {
        ++count[std::size_t(v)];
        ++coarse_count[std::size_t(v >> 4)];
        coarse_sum[std::size_t(v >> 4)] += v;
    }
    void remove(int v) {
        --count[std::size_t(v)];
        --coarse_count[std::size_t(v >> 4)];
        coarse_sum[std::size_t(v >> 4)] -= v;
    }

    // Skip the `drop` largest values, then sum the next `take`.
    long long trimmed_top_sum(int drop, int take) const {
        long long sum = 0;
        for (int cb = 15; cb >= 0 && take > 0; --cb) {
            const int cc = coarse_count[std::size_t(cb)];
            if (cc == 0) continue;
            if (cc <= drop) {
                drop -= cc;
                continue;
            }
            if (drop == 0 && cc <= take) {
                sum += coarse_sum[std::size_t(cb)];
                take -= cc;
                continue;
            }
            for (int v = cb * 16 + 15; v >= cb * 16 && take > 0; --v) {
                int c = count[std::size_t(v)];
                if (c == 0) continue;
                if (c <= drop) {
                    drop -= c;
                    continue;
                }
                c -= drop;
                drop = 0;
                const int t = std::min(c, take);
                sum += (long long)v * t;
                take -= t;
            }
        }
        return sum;
    }
};

} // namespace detail

// Bit-identical to cr_map_naive. Row-parallel when threads > 1; each row owns
// its rolling histogram, so the output is independent of the thread count.
inline FeatureMap cr_map_fast(const QuantizedImage& img, const CrParams& p, int threads = 1) {
    p.validate();
    check_dims(img, "cr_map_fast");

    const int s = p.half_size;
    const int side = p.window_side();
    FeatureMap out = make_feature_map(img.width, img.height);

    parallel_chunks(img.height, threads, [&](int row_begin, int row_end) {
        std::vector<int> rows(static_cast<std::size_t>(side));
        detail::CrHistogram hist;
        for (int y = row_begin; y < row_end; ++y) {
            for (int wy = -s; wy <= s; ++wy)
                rows[std::size_t(wy + s)] = reflect_index(y + wy, img.height);

            hist = detail::CrHistogram{};
            for (int wx = -s; wx <= s; ++wx) {
                const int rx = reflect_index(wx, img.width);
                for (int ry : rows) hist.add(img.at(rx, ry));
            }
            out.at(0, y) = double(hist.trimmed_top_sum(p.drop_count, p.sum_count));

            for (int x = 1; x < img.width; ++x) {
                const int out_col = reflect_index(x - 1 - s, img.width);
                const int in_col = reflect_index(x + s, img.width);
                for (int ry : rows) {
                    hist.remove(img.at(out_col, ry));
                    hist.add(img.at(in_col, ry));
                }
                out.at(x, y) = double(hist.trimmed_top_sum(p.drop_count, p.sum_count));
            }
        }
    });
    return out;
}

} // namespace radiomap
