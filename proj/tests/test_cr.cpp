#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "radiomap/cr.hpp"
#include "test_support.hpp"

using namespace radiomap;

namespace {

// Test-local oracle: gather the reflect-padded window, sort ascending, and
// sum the order statistics X_(N-num-m+1) .. X_(N-m).
long long cr_at_oracle(const QuantizedImage& img, int x, int y, const CrParams& p) {
    std::vector<int> window;
    for (int wy = y - p.half_size; wy <= y + p.half_size; ++wy)
        for (int wx = x - p.half_size; wx <= x + p.half_size; ++wx)
            window.push_back(img.at(reflect_index(wx, img.width),
                                    reflect_index(wy, img.height)));
    std::sort(window.begin(), window.end());
    const int n = int(window.size());
    long long sum = 0;
    for (int k = n - p.sum_count - p.drop_count + 1; k <= n - p.drop_count; ++k)
        sum += window[std::size_t(k - 1)];
    return sum;
}

QuantizedImage ramp_5x5() {
    auto img = make_quantized_image(5, 5);
    for (int i = 0; i < 25; ++i) img.levels[std::size_t(i)] = std::uint8_t(i + 1);
    return img;
}

} // namespace

TEST_CASE("cr on a constant image is sum_count * value") {
    const auto img = make_quantized_image(9, 6, 100);
    const CrParams p; // s=2, num=15, m=5
    const auto naive = cr_map_naive(img, p);
    const auto fast = cr_map_fast(img, p);
    for (double v : naive.values) CHECK(v == 1500.0);
    CHECK(fast.values == naive.values);
}

TEST_CASE("cr center of the 1..25 ramp with defaults") {
    const auto img = ramp_5x5();
    const CrParams p;
    CHECK(cr_at_oracle(img, 2, 2, p) == 195); // ranks 6..20 of distinct 1..25
    const auto map = cr_map_naive(img, p);
    CHECK(map.at(2, 2) == 195.0);
}

TEST_CASE("a single bright outlier is excluded by the top-m trim") {
    auto img = make_quantized_image(5, 5, 0);
    img.at(2, 2) = 255;
    const CrParams p;
    const auto map = cr_map_naive(img, p);
    CHECK(map.at(2, 2) == 0.0);
}

TEST_CASE("1x1 image: reflection makes the window constant") {
    const auto img = make_quantized_image(1, 1, 37);
    const CrParams p;
    const auto naive = cr_map_naive(img, p);
    const auto fast = cr_map_fast(img, p);
    CHECK(naive.at(0, 0) == double(p.sum_count * 37));
    CHECK(fast.values == naive.values);
}

TEST_CASE("asymmetric parameters pin the ascending-order convention") {
    // num + 2m = N makes both order conventions coincide; these params do not.
    const auto img = ramp_5x5();
    CrParams p;
    p.half_size = 2;
    p.sum_count = 10;
    p.drop_count = 3;
    // ascending reading: ranks 13..22 of 1..25
    long long expected = 0;
    for (int v = 13; v <= 22; ++v) expected += v;
    CHECK(cr_at_oracle(img, 2, 2, p) == expected);
    CHECK(cr_map_naive(img, p).at(2, 2) == double(expected));
    CHECK(cr_map_fast(img, p).at(2, 2) == double(expected));
}

TEST_CASE("cr_map_naive matches the per-pixel oracle") {
    std::mt19937 rng(404);
    const auto img = testsupport::random_quantized(17, 12, rng);
    for (CrParams p : {CrParams{2, 15, 5}, CrParams{1, 4, 2}, CrParams{3, 20, 0}}) {
        const auto map = cr_map_naive(img, p);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                REQUIRE(map.at(x, y) == double(cr_at_oracle(img, x, y, p)));
    }
}

TEST_CASE("cr_map_fast equals cr_map_naive exactly on random images") {
    std::mt19937 rng(2718);
    const std::vector<CrParams> param_sets{
        {2, 15, 5}, {2, 10, 3}, {1, 3, 1}, {3, 30, 7}, {2, 24, 1}, {4, 11, 0},
    };
    for (int iter = 0; iter < 10; ++iter) {
        const auto img = testsupport::random_quantized(33, 21, rng);
        for (const auto& p : param_sets) {
            const auto naive = cr_map_naive(img, p);
            const auto fast = cr_map_fast(img, p);
            REQUIRE(fast.values == naive.values);
        }
    }
}

TEST_CASE("cr parallel output is identical to single-threaded") {
    std::mt19937 rng(31415);
    const auto img = testsupport::random_quantized(41, 29, rng);
    const CrParams p;
    const auto serial = cr_map_fast(img, p, 1);
    for (int threads : {2, 3, 7})
        CHECK(cr_map_fast(img, p, threads).values == serial.values);
}

TEST_CASE("raising one pixel never lowers cr anywhere") {
    std::mt19937 rng(5150);
    const CrParams p{2, 10, 3};
    for (int iter = 0; iter < 15; ++iter) {
        auto img = testsupport::random_quantized(11, 9, rng, 0, 250);
        const auto before = cr_map_fast(img, p);
        std::uniform_int_distribution<int> px(0, img.width - 1), py(0, img.height - 1);
        const int x = px(rng), y = py(rng);
        img.at(x, y) = std::uint8_t(std::min(255, img.at(x, y) + 1 +
                                             std::uniform_int_distribution<int>(0, 4)(rng)));
        const auto after = cr_map_fast(img, p);
        for (std::size_t i = 0; i < before.values.size(); ++i)
            REQUIRE(after.values[i] >= before.values[i]);
    }
}

TEST_CASE("cr range stays within [0, 255 * sum_count]") {
    std::mt19937 rng(161803);
    const CrParams p{2, 12, 4};
    const auto img = testsupport::random_quantized(25, 25, rng);
    const auto map = cr_map_fast(img, p);
    for (double v : map.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 255.0 * p.sum_count);
    }
}

TEST_CASE("cr is translation-equivariant away from borders") {
    std::mt19937 rng(271828);
    const auto img = testsupport::random_quantized(20, 14, rng);
    const CrParams p{2, 9, 2};

    // shift content one pixel right
    auto shifted = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = img.width - 1; x >= 1; --x)
            shifted.at(x, y) = img.at(x - 1, y);

    const auto a = cr_map_fast(img, p);
    const auto b = cr_map_fast(shifted, p);
    // interior: windows that never touch either image's border columns
    for (int y = p.half_size; y < img.height - p.half_size; ++y)
        for (int x = p.half_size; x + 1 < img.width - p.half_size; ++x)
            REQUIRE(b.at(x + 1, y) == a.at(x, y));
}

TEST_CASE("cr parameter validation") {
    const auto img = make_quantized_image(4, 4);
    CHECK_THROWS_AS(cr_map_naive(img, CrParams{0, 1, 0}), InvalidArgument);
    CHECK_THROWS_AS(cr_map_naive(img, CrParams{1, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(cr_map_naive(img, CrParams{1, 9, 1}), InvalidArgument); // num+m > 9
    CHECK_THROWS_AS(cr_map_naive(img, CrParams{1, 1, -1}), InvalidArgument);
    CHECK_NOTHROW(cr_map_naive(img, CrParams{1, 9, 0}));
}
