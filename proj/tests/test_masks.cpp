#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "pet/analysis.hpp"
#include "pet/image.hpp"
#include "pet/masks.hpp"

using namespace pet;

namespace {

bool ranks_are_bijection(const DitherMask& m) {
    const size_t n = size_t(m.width) * m.height;
    if (m.ranks.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (uint32_t r : m.ranks) {
        if (r >= n || seen[r]) return false;
        seen[r] = 1;
    }
    return true;
}

ImageF binary_pattern(const DitherMask& m, float density) {
    ImageF img(m.width, m.height, 1);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            img.at(x, y) = m.threshold_at(x, y) < density ? 1.0f : 0.0f;
    return img;
}

} // namespace

TEST_CASE("white-noise mask is a uniform random bijection") {
    const DitherMask m = white_noise_mask(16, 12, 7);
    CHECK(m.width == 16);
    CHECK(m.height == 12);
    CHECK(ranks_are_bijection(m));
    for (float t : m.thresholds) {
        CHECK(t > 0.0f);
        CHECK(t < 1.0f);
    }
    // deterministic per seed, different across seeds
    const DitherMask m2 = white_noise_mask(16, 12, 7);
    CHECK(m.ranks == m2.ranks);
    const DitherMask m3 = white_noise_mask(16, 12, 8);
    CHECK(m.ranks != m3.ranks);
}

TEST_CASE("threshold normalization is centered") {
    DitherMask m;
    m.width = 2;
    m.height = 2;
    m.ranks = {2, 0, 3, 1};
    refresh_thresholds(m);
    CHECK(m.thresholds[0] == doctest::Approx((2 + 0.5) / 4.0));
    CHECK(m.thresholds[1] == doctest::Approx((0 + 0.5) / 4.0));
    CHECK(m.thresholds[3] == doctest::Approx((1 + 0.5) / 4.0));
    // toroidal lookup wraps both axes
    CHECK(m.threshold_at(2, 0) == m.threshold_at(0, 0));
    CHECK(m.threshold_at(1, 5) == m.threshold_at(1, 1));
}

TEST_CASE("threshold levels slice exact pixel counts") {
    const DitherMask m = white_noise_mask(8, 8, 3);
    // exactly half the pixels fall below a 0.5 threshold, etc.
    for (int level : {16, 32, 48}) {
        const float cut = float(level) / 64.0f;
        int below = 0;
        for (float t : m.thresholds) below += t < cut ? 1 : 0;
        CHECK(below == level);
    }
}

TEST_CASE("void-and-cluster mask structure") {
    const DitherMask m = void_and_cluster(32, 32, 1);
    CHECK(ranks_are_bijection(m));
    const DitherMask again = void_and_cluster(32, 32, 1);
    CHECK(m.ranks == again.ranks);  // fully deterministic
    const DitherMask other = void_and_cluster(32, 32, 2);
    CHECK(m.ranks != other.ranks);
}

TEST_CASE("void-and-cluster patterns are blue noise at every density") {
    const DitherMask vc = void_and_cluster(32, 32, 5);
    const DitherMask wn = white_noise_mask(32, 32, 5);
    for (float density : {0.25f, 0.5f}) {
        const ImageF pvc = binary_pattern(vc, density);
        const ImageF pwn = binary_pattern(wn, density);
        // identical pixel budget...
        double svc = 0.0, swn = 0.0;
        for (float v : pvc.data) svc += v;
        for (float v : pwn.data) swn += v;
        CHECK(svc == doctest::Approx(swn));
        CHECK(svc == doctest::Approx(double(density) * 32 * 32));
        // ...but far less low-frequency power
        const double lvc = lowest_octave_power(power_spectrum(pvc));
        const double lwn = lowest_octave_power(power_spectrum(pwn));
        CHECK(lvc < 0.5 * lwn);
    }
}

TEST_CASE("void-and-cluster honors its density knob during seeding") {
    // regardless of the seed density, the final ranks still cover all pixels
    const DitherMask m = void_and_cluster(16, 16, 9, 1.5, 0.25);
    CHECK(ranks_are_bijection(m));
}
