#pragma once

// Binary segmentation metrics: pixelwise confusion counts, Dice, precision,
// sensitivity, and mean +/- sd aggregation across slices or folds.
//
// Degenerate conventions (pinned): a metric whose denominator is zero is 1,
// so two empty masks score (1, 1, 1) and a background-only slice does not
// poison fold means; an empty prediction against a nonempty truth still
// yields dice = 0 and sensitivity = 0 through the ordinary formulas.

#include <cmath>
#include <cstdint>
#include <span>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"

namespace radiomap {

struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

inline Confusion confusion(const BinaryMask& pred, const BinaryMask& gt) {
    check_dims(pred, "confusion pred");
    check_dims(gt, "confusion gt");
    if (pred.width != gt.width || pred.height != gt.height)
        throw InvalidArgument("confusion: mask dimension mismatch");

    Confusion c;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        if (pred.values[i] > 1 || gt.values[i] > 1)
            throw InvalidArgument("confusion: masks must be strictly 0/1");
        const bool p = pred.values[i] != 0;
        const bool g = gt.values[i] != 0;
        if (p && g) ++c.tp;
        else if (p && !g) ++c.fp;
        else if (!p && g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline double dice(const Confusion& c) {
    const auto denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 1.0 : 2.0 * double(c.tp) / double(denom);
}

inline double precision(const Confusion& c) {
    const auto denom = c.tp + c.fp;
    return denom == 0 ? 1.0 : double(c.tp) / double(denom);
}

inline double sensitivity(const Confusion& c) {
    const auto denom = c.tp + c.fn;
    return denom == 0 ? 1.0 : double(c.tp) / double(denom);
}

struct Summary {
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation (n-1); 0 for a single value
    std::size_t n = 0;
};

inline Summary aggregate(std::span<const double> values) {
    if (values.empty())
        throw InvalidArgument("aggregate: empty value list");
    Summary s;
    s.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / double(s.n);
    if (s.n > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(sq / double(s.n - 1));
    }
    return s;
}

} // namespace radiomap
