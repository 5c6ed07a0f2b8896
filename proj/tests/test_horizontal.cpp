#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pet/errors.hpp"
#include "pet/horizontal.hpp"
#include "pet/masks.hpp"
#include "support.hpp"

using namespace pet;
using namespace testsup;

namespace {

bool trace_non_increasing(const std::vector<double>& t) {
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] > t[i - 1] + 1e-9 * std::max(1.0, std::abs(t[i - 1]))) return false;
    return true;
}

ImageF binary_noise(CounterRng& rng, int w, int h, float density = 0.5f) {
    ImageF img(w, h, 1);
    for (float& v : img.data) v = rng.next_float() < density ? 1.0f : 0.0f;
    return img;
}

std::vector<float> sorted_values(const ImageF& img) {
    std::vector<float> v = img.data;
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("permutation plumbing") {
    Permutation p = Permutation::identity(3, 2);
    CHECK(p.is_bijection());
    CHECK(p.source.size() == 6);
    std::swap(p.source[0], p.source[4]);
    CHECK(p.is_bijection());
    p.source[1] = p.source[2];
    CHECK_FALSE(p.is_bijection());

    Permutation q = Permutation::identity(2, 2);
    q.source = {3, 2, 1, 0};  // reverse
    ImageF img(2, 2, 1);
    for (int i = 0; i < 4; ++i) img.data[size_t(i)] = float(i);
    const ImageF out = apply_permutation(img, q);
    for (int i = 0; i < 4; ++i) CHECK(out.data[size_t(i)] == float(3 - i));
}

TEST_CASE("relocation admissibility") {
    SUBCASE("disk allows euclidean travel up to the radius") {
        const Dissimilarity d = Dissimilarity::disk(1.0);
        CHECK(d.allowed(0, 0));
        CHECK(d.allowed(1, 0));
        CHECK(d.allowed(0, -1));
        CHECK_FALSE(d.allowed(1, 1));  // sqrt(2) > 1
        CHECK(d.at(1, 0) == 0.0);      // free inside

        const Dissimilarity d2 = Dissimilarity::disk(1.5);
        CHECK(d2.allowed(1, 1));
        CHECK_FALSE(d2.allowed(2, 0));
    }
    SUBCASE("cost maps charge per offset and bound the extent") {
        const std::vector<double> cost = {2, 1, 2, 1, 0, 1, 2, 1, 2};
        const Dissimilarity d = Dissimilarity::cost_map(1, cost, 0.5);
        CHECK(d.allowed(1, 1));
        CHECK_FALSE(d.allowed(2, 0));
        CHECK(d.at(0, 0) == 0.0);
        CHECK(d.at(1, 0) == doctest::Approx(0.5));
        CHECK(d.at(-1, -1) == doctest::Approx(1.0));
        CHECK_THROWS_AS(Dissimilarity::cost_map(1, {1.0}, 1.0), ConfigError);
        CHECK_THROWS_AS(Dissimilarity::cost_map(1, cost, -1.0), ConfigError);
    }
}

TEST_CASE("swap search reduces energy and respects travel bounds") {
    for (uint64_t seed : {1, 2}) {
        CounterRng rng(seed, 30);
        const ImageF img = binary_noise(rng, 16, 16);
        const ImageF surrogate = constant_image(16, 16, 1, 0.5f);
        PerceptualModel m;  // binomial display kernel
        const double travel = 2.0;
        const HorizontalResult r =
            horizontal_minimize(img, surrogate, m, Dissimilarity::disk(travel), 2, 8, Traversal::Serpentine);

        CHECK(r.perm.is_bijection());
        CHECK(trace_non_increasing(r.trace));
        CHECK(r.trace.back() < r.trace.front());  // some swap must help binary noise
        CHECK(r.trace.size() == size_t(r.sweeps) + 1);

        // output image is exactly the permuted input
        const ImageF permuted = apply_permutation(img, r.perm);
        CHECK(r.image.data == permuted.data);
        // pixel histogram is preserved
        CHECK(sorted_values(r.image) == sorted_values(img));

        // net displacement never exceeds the disk radius
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                const int s = int(r.perm.source[size_t(y) * 16 + x]);
                const int sx = s % 16, sy = s / 16;
                CHECK(double(x - sx) * (x - sx) + double(y - sy) * (y - sy) <=
                      travel * travel + 1e-12);
            }

        // the reported objective matches an independent recomputation
        CHECK(r.trace.back() ==
              doctest::Approx(perceptual_energy(r.image, surrogate, m)).epsilon(1e-4));

        // deterministic
        const HorizontalResult again =
            horizontal_minimize(img, surrogate, m, Dissimilarity::disk(travel), 2, 8, Traversal::Serpentine);
        CHECK(again.perm.source == r.perm.source);
        CHECK(again.trace == r.trace);
    }
}

TEST_CASE("relocation supports the random traversal") {
    CounterRng rng(4, 32);
    const ImageF img = binary_noise(rng, 12, 12);
    const ImageF surrogate = constant_image(12, 12, 1, 0.5f);
    PerceptualModel m;
    const HorizontalResult r = horizontal_minimize(img, surrogate, m, Dissimilarity::disk(1.5),
                                                   1, 6, Traversal::Random);
    CHECK(r.perm.is_bijection());
    CHECK(trace_non_increasing(r.trace));
    CHECK(r.trace.back() < r.trace.front());
    CHECK(sorted_values(r.image) == sorted_values(img));
    const HorizontalResult again = horizontal_minimize(img, surrogate, m,
                                                       Dissimilarity::disk(1.5), 1, 6,
                                                       Traversal::Random);
    CHECK(again.perm.source == r.perm.source);
    CHECK(again.trace == r.trace);
}

TEST_CASE("cost-map mode folds the travel charge into the objective") {
    CounterRng rng(3, 31);
    const ImageF img = binary_noise(rng, 12, 12);
    const ImageF surrogate = constant_image(12, 12, 1, 0.5f);
    PerceptualModel m;
    const std::vector<double> cost = {2, 1, 2, 1, 0, 1, 2, 1, 2};
    const Dissimilarity d = Dissimilarity::cost_map(1, cost, 0.02);
    const HorizontalResult r = horizontal_minimize(img, surrogate, m, d, 1, 6);

    CHECK(r.perm.is_bijection());
    CHECK(trace_non_increasing(r.trace));

    double travel_charge = 0.0;
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            const int s = int(r.perm.source[size_t(y) * 12 + x]);
            const int sx = s % 12, sy = s / 12;
            CHECK(std::abs(x - sx) <= 1);
            CHECK(std::abs(y - sy) <= 1);
            travel_charge += d.at(x - sx, y - sy);
        }
    CHECK(r.trace.back() ==
          doctest::Approx(perceptual_energy(r.image, surrogate, m) + travel_charge)
              .epsilon(1e-4));
}

TEST_CASE("swap search re-renders through modulation planes") {
    CounterRng rng(4, 32);
    const int W = 12, H = 12;
    AuxPlanes aux;
    aux.alpha = ImageF(W, H, 1);
    aux.beta = ImageF(W, H, 1);
    ImageF est(W, H, 1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            aux.alpha.at(x, y) = 0.5f + rng.next_float();          // in [0.5, 1.5]
            aux.beta.at(x, y) = 0.1f * rng.next_float();
            est.at(x, y) = aux.alpha.at(x, y) * 2.0f * rng.next_float() + aux.beta.at(x, y);
        }
    const ImageF surrogate = constant_image(W, H, 1, 0.6f);
    PerceptualModel m;
    const HorizontalResult r =
        horizontal_minimize(est, surrogate, m, Dissimilarity::disk(2.0), 2, 6,
                            Traversal::Serpentine, &aux);

    CHECK(r.perm.is_bijection());
    CHECK(trace_non_increasing(r.trace));

    // each output pixel is alpha_i * demod(source) + beta_i
    const ImageF demod = demodulate(est, aux);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const int s = int(r.perm.source[size_t(y) * W + x]);
            const float want =
                aux.alpha.at(x, y) * demod.data[size_t(s)] + aux.beta.at(x, y);
            CHECK(r.image.at(x, y) == doctest::Approx(want).epsilon(1e-5));
        }
}

TEST_CASE("tile order-statistics baseline, frozen 2x2 case") {
    ImageF est(2, 2, 1);
    est.data = {0.1f, 0.9f, 0.5f, 0.3f};
    DitherMask mask;
    mask.width = 2;
    mask.height = 2;
    mask.thresholds = {0.6f, 0.2f, 0.8f, 0.4f};
    mask.ranks = {2, 0, 3, 1};
    const HorizontalResult r = permutation_baseline(est, mask, 2);
    // darkest pixel (0) goes to the smallest threshold (cell 1), etc.
    CHECK(r.perm.source[0] == 2);
    CHECK(r.perm.source[1] == 0);
    CHECK(r.perm.source[2] == 1);
    CHECK(r.perm.source[3] == 3);
    CHECK(r.image.data == std::vector<float>{0.5f, 0.1f, 0.9f, 0.3f});
    CHECK(r.perm.is_bijection());
    CHECK(r.trace.empty());
}

TEST_CASE("tile baseline keeps pixels inside their tile") {
    CounterRng rng(5, 33);
    const ImageF est = random_image(rng, 8, 8, 1);
    const DitherMask mask = white_noise_mask(8, 8, 1);
    const int tile = 4;
    const HorizontalResult r = permutation_baseline(est, mask, tile);
    CHECK(r.perm.is_bijection());
    CHECK(sorted_values(r.image) == sorted_values(est));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const int s = int(r.perm.source[size_t(y) * 8 + x]);
            const int sx = s % 8, sy = s / 8;
            CHECK(x / tile == sx / tile);
            CHECK(y / tile == sy / tile);
        }
}

TEST_CASE("tile baseline wraps a small mask toroidally") {
    CounterRng rng(7, 35);
    const ImageF est = random_image(rng, 8, 8, 1);
    const DitherMask small = white_noise_mask(4, 4, 2);

    // replicate the 4x4 thresholds onto an 8x8 mask by hand
    DitherMask big;
    big.width = 8;
    big.height = 8;
    big.thresholds.resize(64);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            big.thresholds[size_t(y) * 8 + x] = small.threshold_at(x, y);
    big.ranks.resize(64);
    std::vector<int> order(64);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return big.thresholds[size_t(a)] < big.thresholds[size_t(b)];
    });
    for (int r = 0; r < 64; ++r) big.ranks[size_t(order[size_t(r)])] = uint32_t(r);

    const HorizontalResult via_wrap = permutation_baseline(est, small, 4);
    const HorizontalResult via_big = permutation_baseline(est, big, 4);
    CHECK(via_wrap.perm.source == via_big.perm.source);
    CHECK(via_wrap.perm.is_bijection());
    CHECK(sorted_values(via_wrap.image) == sorted_values(est));
}

TEST_CASE("noise shaping preserves the histogram while chasing the target") {
    CounterRng rng(6, 34);
    const ImageF img = random_image(rng, 16, 16, 1);

    SUBCASE("low-pass target drains low-frequency content") {
        const HorizontalResult r = shaped_noise(img, Kernel::gaussian(1.0), 12, 1);
        CHECK(trace_non_increasing(r.trace));
        CHECK(r.trace.back() < r.trace.front());
        CHECK(sorted_values(r.image) == sorted_values(img));
        CHECK(r.perm.is_bijection());
        CHECK(r.image.data == apply_permutation(img, r.perm).data);
        CHECK(r.trace.size() == size_t(r.sweeps) + 1);
    }
    SUBCASE("spatially varying targets are supported") {
        const Kernel lo = Kernel::gaussian(1.0);
        const Kernel hi = Kernel::highpass(1.0, lo.radius);
        const Kernel blend = Kernel::blend_horizontal(lo, hi, 16, 16);
        const HorizontalResult r = shaped_noise(img, blend, 8, 2);
        CHECK(trace_non_increasing(r.trace));
        CHECK(sorted_values(r.image) == sorted_values(img));
    }
    SUBCASE("deterministic in the seed") {
        const HorizontalResult a = shaped_noise(img, Kernel::gaussian(1.0), 4, 9);
        const HorizontalResult b = shaped_noise(img, Kernel::gaussian(1.0), 4, 9);
        CHECK(a.perm.source == b.perm.source);
        CHECK(a.trace == b.trace);
    }
}

TEST_CASE("sample-layout optimization over an integrand bank") {
    CounterRng rng(7, 35);
    EstimateStack samples(10, 10, 1, 3);
    for (float& v : samples.data) v = rng.next_float();
    PerceptualModel m;
    m.tonemap = ToneMap::Identity;

    SUBCASE("final-prefix weights drive the energy down") {
        const std::vector<std::vector<double>> w = {{0.0, 0.0, 1.0}};
        const AprioriResult r = apriori_optimize(make_linear_bank(), samples, w, m, 6, 1);
        CHECK(r.perm.is_bijection());
        CHECK(trace_non_increasing(r.trace));
        CHECK(r.trace.back() < r.trace.front());
        CHECK(r.trace.size() == size_t(r.sweeps) + 1);
    }
    SUBCASE("all-zero weights keep the identity layout") {
        const std::vector<std::vector<double>> w = {{0.0, 0.0, 0.0}};
        const AprioriResult r = apriori_optimize(make_linear_bank(), samples, w, m, 3, 1);
        const Permutation id = Permutation::identity(10, 10);
        CHECK(r.perm.source == id.source);
    }
    SUBCASE("multiple heaviside integrands combine") {
        const IntegrandBank bank = make_heaviside_bank(3, 11);
        const std::vector<std::vector<double>> w = {
            {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
        const AprioriResult r = apriori_optimize(bank, samples, w, m, 5, 2);
        CHECK(r.perm.is_bijection());
        CHECK(trace_non_increasing(r.trace));
    }
    SUBCASE("weight shape mismatches are rejected") {
        CHECK_THROWS_AS(
            apriori_optimize(make_linear_bank(), samples, {{1.0}}, m, 2, 0),
            ConfigError);
        CHECK_THROWS_AS(
            apriori_optimize(make_heaviside_bank(2, 0), samples, {{0, 0, 1.0}}, m, 2, 0),
            ConfigError);
    }
}
