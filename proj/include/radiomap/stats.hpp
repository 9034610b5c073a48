#pragma once

// Wilcoxon signed-rank test for paired samples, with Bonferroni adjustment.
//
// Differences are treatment - baseline; zero differences are dropped
// (Wilcoxon's original procedure). |d| are ranked with midranks for ties.
// For n <= 20 the p-value is exact, from the full null distribution of W+
// over all 2^n sign assignments (computed by convolution, so ties are
// handled exactly); beyond that the normal approximation with tie and
// continuity corrections is used.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "radiomap/csv.hpp"
#include "radiomap/errors.hpp"

namespace radiomap {

struct PairedSamples {
    std::vector<std::pair<double, double>> pairs; // (baseline, treatment)
};

enum class Alternative { two_sided, greater };

struct WilcoxonResult {
    double w = 0.0;  // min(W+, W-) two-sided; W+ for "greater"
    double p = 1.0;
    int n = 0;       // pairs remaining after zero-difference removal
    bool exact = true;
};

namespace detail {

// Midranks of |d|, scaled by 2 so ties on half-integers stay integral.
inline std::vector<int> scaled_midranks(const std::vector<double>& abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_diffs[a] < abs_diffs[b]; });

    std::vector<int> ranks2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
        // ranks i+1 .. j+1 (1-based) averaged; doubled to stay integral
        const int rank2 = int(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks2[order[k]] = rank2;
        i = j + 1;
    }
    return ranks2;
}

// Null distribution of the scaled W+ by convolution over (1 + x^rank2).
inline std::vector<std::uint64_t> wplus_null_counts(const std::vector<int>& ranks2) {
    const int total2 = std::accumulate(ranks2.begin(), ranks2.end(), 0);
    std::vector<std::uint64_t> counts(std::size_t(total2) + 1, 0);
    counts[0] = 1;
    int reach = 0;
    for (int r : ranks2) {
        for (int k = reach; k >= 0; --k)
            if (counts[std::size_t(k)]) counts[std::size_t(k + r)] += counts[std::size_t(k)];
        reach += r;
    }
    return counts;
}

inline double wilcoxon_exact_p(const std::vector<int>& ranks2, double w_plus,
                               Alternative alt) {
    const auto counts = wplus_null_counts(ranks2);
    const int total2 = int(counts.size()) - 1;
    const double denom = std::ldexp(1.0, int(ranks2.size())); // 2^n, exact
    const int w_plus2 = int(std::llround(2.0 * w_plus));

    std::uint64_t hits = 0;
    if (alt == Alternative::greater) {
        for (int k = w_plus2; k <= total2; ++k) hits += counts[std::size_t(k)];
    } else {
        const int w_min2 = std::min(w_plus2, total2 - w_plus2);
        for (int k = 0; k <= w_min2; ++k) hits += counts[std::size_t(k)];
        for (int k = total2 - w_min2; k <= total2; ++k) hits += counts[std::size_t(k)];
    }
    return std::min(1.0, double(hits) / denom);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Large-sample path: tie-corrected variance and a 0.5 continuity correction.
inline double wilcoxon_normal_p(const std::vector<int>& ranks2, double w_plus,
                                Alternative alt) {
    const double n = double(ranks2.size());
    const double mean = n * (n + 1.0) / 4.0;
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;

    // Tie groups over the scaled ranks: each group of size t removes
    // (t^3 - t) / 48 from the variance.
    std::vector<int> sorted = ranks2;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = double(j - i + 1);
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    const double sd = std::sqrt(var);
    if (sd == 0.0) return 1.0;

    if (alt == Alternative::greater)
        return std::min(1.0, normal_cdf((mean - w_plus + 0.5) / sd));
    const double w_min = std::min(w_plus, 2.0 * mean - w_plus);
    return std::min(1.0, 2.0 * normal_cdf((w_min - mean + 0.5) / sd));
}

} // namespace detail

inline WilcoxonResult wilcoxon_signed_rank(const PairedSamples& samples,
                                           Alternative alt = Alternative::two_sided) {
    if (samples.pairs.empty())
        throw InvalidArgument("wilcoxon_signed_rank: at least one pair required");

    std::vector<double> diffs;
    diffs.reserve(samples.pairs.size());
    for (const auto& [baseline, treatment] : samples.pairs) {
        if (!std::isfinite(baseline) || !std::isfinite(treatment))
            throw InvalidArgument("wilcoxon_signed_rank: non-finite sample");
        const double d = treatment - baseline;
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult result;
    result.n = int(diffs.size());
    if (diffs.empty()) {
        result.w = 0.0;
        result.p = 1.0;
        return result; // all differences zero: defined, not an error
    }

    std::vector<double> abs_diffs(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) abs_diffs[i] = std::fabs(diffs[i]);
    const auto ranks2 = detail::scaled_midranks(abs_diffs);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0.0) w_plus += ranks2[i] / 2.0;
    const double total = double(diffs.size()) * double(diffs.size() + 1) / 2.0;
    const double w_minus = total - w_plus;

    result.w = alt == Alternative::greater ? w_plus : std::min(w_plus, w_minus);
    result.exact = diffs.size() <= 20;
    result.p = result.exact ? detail::wilcoxon_exact_p(ranks2, w_plus, alt)
                            : detail::wilcoxon_normal_p(ranks2, w_plus, alt);
    return result;
}

// adjusted = min(1, p * m); m must cover at least the p-values supplied.
inline std::vector<double> bonferroni(const std::vector<double>& pvalues, std::size_t m) {
    if (m < pvalues.size())
        throw InvalidArgument("bonferroni: m smaller than the number of p-values");
    std::vector<double> adjusted;
    adjusted.reserve(pvalues.size());
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0))
            throw InvalidArgument("bonferroni: p-value outside [0, 1]");
        adjusted.push_back(std::min(1.0, p * double(m)));
    }
    return adjusted;
}

// Paired CSV: columns "baseline" and "treatment", one row per slice or fold.
inline PairedSamples load_paired_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line))
        throw ParseError("empty paired-samples file", 0);
    ++line_no;
    const auto header = detail::split_csv_line(line);
    int base_col = -1, treat_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = detail::trim(header[i]);
        if (name == "baseline") base_col = int(i);
        if (name == "treatment") treat_col = int(i);
    }
    if (base_col < 0 || treat_col < 0)
        throw ParseError("paired CSV needs \"baseline\" and \"treatment\" columns (line 1)", 0);

    PairedSamples samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (base_col >= int(fields.size()) || treat_col >= int(fields.size()))
            throw ParseError("missing cell (line " + std::to_string(line_no) + ")", 0);
        samples.pairs.emplace_back(
            detail::parse_csv_number(fields[std::size_t(base_col)], "baseline", line_no),
            detail::parse_csv_number(fields[std::size_t(treat_col)], "treatment", line_no));
    }
    if (samples.pairs.empty())
        throw ParseError("paired CSV has no data rows", 0);
    return samples;
}

} // namespace radiomap
