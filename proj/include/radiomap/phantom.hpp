#pragma once

// Deterministic synthetic FLAIR-like slices: elliptical hyperintense lesions
// on a noisy background with an optional smooth diagonal gradient, plus the
// exact ground-truth mask. Identical spec + seed reproduces identical pixels.
//
// Noise is counter-based so generation order never matters: sample k of seed
// s is mix64(s + (k+1) * 0x9E3779B97F4A7C15) (SplitMix64), and gaussians come
// from one Box-Muller evaluation over two such uniforms per pixel.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "radiomap/errors.hpp"
#include "radiomap/image.hpp"

namespace radiomap {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

// Uniform in (0, 1]: the +1 keeps log() off zero.
inline double uniform_open(std::uint64_t seed, std::uint64_t counter) {
    return double((counter_rand(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

inline double gaussian_at(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform_open(seed, 2 * index);
    const double u2 = uniform_open(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace detail

struct Lesion {
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_a = 1.0;       // semi-axis along the lesion's own x
    double semi_b = 1.0;
    double angle_deg = 0.0;    // counterclockwise rotation
    double boost = 50.0;       // intensity added inside the ellipse
};

struct PhantomSpec {
    int width = 96;
    int height = 96;
    double background_mean = 100.0;
    double background_noise_sd = 8.0;
    double gradient_amplitude = 0.0; // smooth diagonal ramp, 0 .. amplitude
    std::uint64_t seed = 0;
    std::vector<Lesion> lesions;
};

namespace detail {

inline bool inside_lesion(const Lesion& l, double x, double y) {
    const double theta = l.angle_deg * std::numbers::pi / 180.0;
    const double dx = x - l.center_x;
    const double dy = y - l.center_y;
    const double u = dx * std::cos(theta) + dy * std::sin(theta);
    const double v = -dx * std::sin(theta) + dy * std::cos(theta);
    const double eu = u / l.semi_a;
    const double ev = v / l.semi_b;
    return eu * eu + ev * ev <= 1.0;
}

inline void check_spec(const PhantomSpec& spec) {
    if (spec.width < 1 || spec.height < 1)
        throw InvalidArgument("phantom: dimensions must be >= 1");
    if (spec.background_noise_sd < 0.0)
        throw InvalidArgument("phantom: noise sd must be >= 0");
    for (const auto& l : spec.lesions) {
        if (l.semi_a <= 0.0 || l.semi_b <= 0.0)
            throw InvalidArgument("phantom: lesion semi-axes must be > 0");
        if (l.boost <= 0.0)
            throw InvalidArgument("phantom: lesion boost must be > 0");
        // Bounding half-extents of the rotated ellipse must stay inside.
        const double theta = l.angle_deg * std::numbers::pi / 180.0;
        const double ex = std::hypot(l.semi_a * std::cos(theta), l.semi_b * std::sin(theta));
        const double ey = std::hypot(l.semi_a * std::sin(theta), l.semi_b * std::cos(theta));
        if (l.center_x - ex < 0.0 || l.center_x + ex > spec.width - 1 ||
            l.center_y - ey < 0.0 || l.center_y + ey > spec.height - 1)
            throw InvalidArgument("phantom: lesion ellipse exceeds image bounds");
    }
}

} // namespace detail

// pixel = background.mean + gradient + boost (if inside a lesion; overlaps
// take the strongest) + noise_sd * gaussian. Mask = union of the ellipses.
inline std::pair<GrayImage, BinaryMask> generate(const PhantomSpec& spec) {
    detail::check_spec(spec);

    GrayImage img = make_gray_image(spec.width, spec.height);
    BinaryMask mask = make_binary_mask(spec.width, spec.height);

    const double denom = double(spec.width - 1 + spec.height - 1);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const std::size_t idx = std::size_t(y) * spec.width + x;
            double v = spec.background_mean;
            if (denom > 0.0)
                v += spec.gradient_amplitude * double(x + y) / denom;

            double boost = 0.0;
            bool inside = false;
            for (const auto& l : spec.lesions) {
                if (detail::inside_lesion(l, double(x), double(y))) {
                    inside = true;
                    boost = std::max(boost, l.boost);
                }
            }
            v += boost;
            if (spec.background_noise_sd > 0.0)
                v += spec.background_noise_sd * detail::gaussian_at(spec.seed, idx);

            img.values[idx] = v;
            mask.values[idx] = inside ? 1 : 0;
        }
    }
    return {std::move(img), std::move(mask)};
}

// Mean map value over mask=1 and over mask=0 pixels.
inline std::pair<double, double> feature_contrast(const BinaryMask& mask,
                                                  const FeatureMap& map) {
    check_dims(mask, "feature_contrast mask");
    check_dims(map, "feature_contrast map");
    if (mask.width != map.width || mask.height != map.height)
        throw InvalidArgument("feature_contrast: dimension mismatch");

    double sum_in = 0.0, sum_out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (mask.values[i]) {
            sum_in += map.values[i];
            ++n_in;
        } else {
            sum_out += map.values[i];
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0)
        throw InvalidArgument("feature_contrast: mask must contain both classes");
    return {sum_in / double(n_in), sum_out / double(n_out)};
}

inline PhantomSpec phantom_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("phantom spec is not valid JSON: ") + e.what(), 0);
    }

    PhantomSpec spec;
    try {
        spec.width = j.at("width").get<int>();
        spec.height = j.at("height").get<int>();
        if (j.contains("background")) {
            spec.background_mean = j["background"].value("mean", spec.background_mean);
            spec.background_noise_sd = j["background"].value("noise_sd", spec.background_noise_sd);
        }
        spec.gradient_amplitude = j.value("gradient", spec.gradient_amplitude);
        spec.seed = j.value("seed", std::uint64_t(0));
        if (j.contains("lesions")) {
            for (const auto& jl : j["lesions"]) {
                Lesion l;
                l.center_x = jl.at("center").at(0).get<double>();
                l.center_y = jl.at("center").at(1).get<double>();
                l.semi_a = jl.at("semi_axes").at(0).get<double>();
                l.semi_b = jl.at("semi_axes").at(1).get<double>();
                l.angle_deg = jl.value("angle_deg", 0.0);
                l.boost = jl.value("boost", 50.0);
                spec.lesions.push_back(l);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("phantom spec: ") + e.what(), 0);
    }
    detail::check_spec(spec);
    return spec;
}

inline std::string phantom_spec_to_json(const PhantomSpec& spec) {
    nlohmann::json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["background"] = {{"mean", spec.background_mean}, {"noise_sd", spec.background_noise_sd}};
    j["gradient"] = spec.gradient_amplitude;
    j["seed"] = spec.seed;
    j["lesions"] = nlohmann::json::array();
    for (const auto& l : spec.lesions) {
        j["lesions"].push_back({{"center", {l.center_x, l.center_y}},
                                {"semi_axes", {l.semi_a, l.semi_b}},
                                {"angle_deg", l.angle_deg},
                                {"boost", l.boost}});
    }
    return j.dump(2);
}

} // namespace radiomap
