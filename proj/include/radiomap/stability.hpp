#pragma once

// Validation-curve smoothness: SDD is the population standard deviation of
// the consecutive score differences d_i = score_i - score_{i-1}. A curve of
// P points yields P-1 differences and the divisor is P-1, so constant-slope
// curves score exactly 0.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "radiomap/csv.hpp"
#include "radiomap/errors.hpp"

namespace radiomap {

struct ValidationCurve {
    std::vector<double> scores;
    std::string label;
};

inline double sdd(const ValidationCurve& curve) {
    if (curve.scores.size() < 2)
        throw InvalidArgument("sdd: curve needs at least 2 points");
    for (double v : curve.scores)
        if (!std::isfinite(v))
            throw InvalidArgument("sdd: non-finite score");

    const std::size_t n = curve.scores.size() - 1; // number of differences
    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i)
        diffs[i] = curve.scores[i + 1] - curve.scores[i];

    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= double(n);

    double sq = 0.0;
    for (double d : diffs) sq += (d - mean) * (d - mean);
    return std::sqrt(sq / double(n));
}

// CSV with a numeric "score" column; an optional "epoch" column (and any
// other columns) are ignored. Scores keep file order.
inline ValidationCurve load_curve(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("empty curve file", 0);
    ++line_no;
    const auto header = detail::split_csv_line(line);
    int score_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (detail::trim(header[i]) == "score") score_col = int(i);
    if (score_col < 0)
        throw ParseError("curve file has no \"score\" column (line 1)", 0);

    ValidationCurve curve;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (score_col >= int(fields.size()))
            throw ParseError("missing score cell (line " + std::to_string(line_no) + ")", 0);
        curve.scores.push_back(
            detail::parse_csv_number(fields[std::size_t(score_col)], "score", line_no));
    }
    if (curve.scores.empty())
        throw ParseError("curve file has no data rows", 0);
    return curve;
}

} // namespace radiomap
