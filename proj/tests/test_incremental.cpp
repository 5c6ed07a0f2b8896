#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pet/errors.hpp"
#include "pet/incremental.hpp"
#include "support.hpp"

using namespace pet;
using namespace testsup;

namespace {

// Direct evaluation of sum_v g(v - x) g(v) for a uniform kernel.
double brute_uniform_autocorr(const Kernel& g, int ox, int oy) {
    const int K = g.radius;
    double acc = 0.0;
    for (int vy = -K; vy <= K; ++vy)
        for (int vx = -K; vx <= K; ++vx) {
            const int ux = vx - ox, uy = vy - oy;
            if (ux < -K || ux > K || uy < -K || uy > K) continue;
            acc += double(g.w(g.weights.data(), ux, uy)) * double(g.w(g.weights.data(), vx, vy));
        }
    return acc;
}

// Direct evaluation of sum_i g_{i,a} g_{i,b} for a varying kernel, where
// g_{i,x} = w_i(i - x).
double brute_varying_pair(const Kernel& g, int ax, int ay, int bx, int by) {
    const int K = g.radius;
    double acc = 0.0;
    for (int iy = 0; iy < g.field_height; ++iy)
        for (int ix = 0; ix < g.field_width; ++ix) {
            const int uax = ix - ax, uay = iy - ay;
            const int ubx = ix - bx, uby = iy - by;
            if (uax < -K || uax > K || uay < -K || uay > K) continue;
            if (ubx < -K || ubx > K || uby < -K || uby > K) continue;
            const float* t = g.table_at(ix, iy);
            acc += double(g.w(t, uax, uay)) * double(g.w(t, ubx, uby));
        }
    return acc;
}

// Applies deltas to a double copy of the estimate.
std::vector<double> apply_deltas(const ImageF& est, const std::vector<PixelDelta>& ups) {
    std::vector<double> v = to_double(est);
    for (const PixelDelta& u : ups)
        for (int c = 0; c < est.channels; ++c)
            v[(size_t(u.y) * est.width + u.x) * est.channels + c] += u.d[size_t(c)];
    return v;
}

} // namespace

TEST_CASE("uniform autocorrelation table") {
    SUBCASE("binomial values frozen by hand") {
        const AutoCorr a = precompute_autocorr(Kernel::binomial3());
        CHECK(a.at_offset(0, 0) == doctest::Approx(36.0 / 256.0).epsilon(1e-12));
        CHECK(a.at_offset(1, 0) == doctest::Approx(24.0 / 256.0).epsilon(1e-12));
        CHECK(a.at_offset(1, 1) == doctest::Approx(16.0 / 256.0).epsilon(1e-12));
        CHECK(a.at_offset(2, 0) == doctest::Approx(6.0 / 256.0).epsilon(1e-12));
        CHECK(a.at_offset(2, 2) == doctest::Approx(1.0 / 256.0).epsilon(1e-12));
        CHECK(a.at_offset(3, 0) == 0.0);  // beyond 2K: supports cannot overlap
    }
    SUBCASE("matches the direct sum and is symmetric") {
        CounterRng rng(3, 1);
        const Kernel k = random_uniform_kernel(rng, 2);
        const AutoCorr a = precompute_autocorr(k);
        for (int oy = -5; oy <= 5; ++oy)
            for (int ox = -5; ox <= 5; ++ox) {
                const double want =
                    (std::abs(ox) > 4 || std::abs(oy) > 4) ? 0.0 : brute_uniform_autocorr(k, ox, oy);
                CHECK(a.at_offset(ox, oy) == doctest::Approx(want).epsilon(1e-12));
                CHECK(a.at_offset(ox, oy) == doctest::Approx(a.at_offset(-ox, -oy)).epsilon(1e-12));
            }
    }
    SUBCASE("delta kernel autocorrelation is a unit impulse") {
        const AutoCorr a = precompute_autocorr(Kernel::delta());
        CHECK(a.at_offset(0, 0) == 1.0);
        CHECK(a.at_offset(1, 0) == 0.0);
    }
}

TEST_CASE("varying-kernel autocorrelation tables") {
    CounterRng rng(4, 2);
    const int W = 6, H = 5, K = 1;
    const Kernel k = random_varying_kernel(rng, W, H, K);
    const AutoCorr a = precompute_autocorr(k);
    REQUIRE(a.varying);
    for (int ay = 0; ay < H; ++ay)
        for (int ax = 0; ax < W; ++ax) {
            CHECK(a.diag[size_t(ay) * W + ax] ==
                  doctest::Approx(brute_varying_pair(k, ax, ay, ax, ay)).epsilon(1e-10));
            for (int by = 0; by < H; ++by)
                for (int bx = 0; bx < W; ++bx) {
                    if (std::abs(bx - ax) > 2 * K || std::abs(by - ay) > 2 * K) continue;
                    const double want = brute_varying_pair(k, ax, ay, bx, by);
                    CHECK(a.at_pair(ax, ay, bx, by) == doctest::Approx(want).epsilon(1e-10));
                    // the pair sum is symmetric in its two pixels
                    CHECK(a.at_pair(bx, by, ax, ay) ==
                          doctest::Approx(a.at_pair(ax, ay, bx, by)).epsilon(1e-12));
                }
        }
}

TEST_CASE("initial energy matches the brute-force oracle") {
    CounterRng rng(7, 3);
    SUBCASE("uniform kernel, extended support") {
        const ImageF est = random_image(rng, 8, 7, 1);
        const Kernel g = random_uniform_kernel(rng, 2);
        const int pad = 3;  // deliberately larger than the radius
        const ImageF target =
            random_image(rng, est.width + 2 * pad, est.height + 2 * pad, 1, -0.5f, 0.5f);
        const IncrementalState s = IncrementalState::init(g, est, target);
        const double want = brute_energy_d(to_double(est), est.width, est.height, 1, target, g);
        CHECK(s.energy() == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("varying kernel, image support") {
        const ImageF est = random_image(rng, 7, 6, 1);
        const Kernel g = random_varying_kernel(rng, 7, 6, 1);
        const ImageF target = random_image(rng, 7, 6, 1, -0.5f, 0.5f);
        const IncrementalState s = IncrementalState::init(g, est, target);
        const double want = brute_energy_d(to_double(est), 7, 6, 1, target, g);
        CHECK(s.energy() == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("three channels with per-channel weights") {
        const ImageF est = random_image(rng, 5, 5, 3);
        const Kernel g = random_uniform_kernel(rng, 1);
        const ImageF target = random_image(rng, 7, 7, 3, -0.5f, 0.5f);
        const std::array<double, 3> lambda = {kLumaR, kLumaG, kLumaB};
        const IncrementalState s = IncrementalState::init(g, est, target, lambda);
        const double want =
            brute_energy_d(to_double(est), 5, 5, 3, target, g, lambda);
        CHECK(s.energy() == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("invalid initializations are rejected") {
    const ImageF est = constant_image(4, 4, 1, 0.5f);
    const Kernel g = Kernel::binomial3();
    // pad smaller than the kernel radius
    CHECK_THROWS_AS(IncrementalState::init(g, est, constant_image(4, 4, 1, 0.0f)), ConfigError);
    // asymmetric padding
    CHECK_THROWS_AS(IncrementalState::init(g, est, constant_image(6, 8, 1, 0.0f)), ConfigError);
    // varying kernel wants an image-support target
    const Kernel v = Kernel::varying_field(4, 4, 1, [](int, int, float* t) {
        for (int i = 0; i < 9; ++i) t[i] = 1.0f / 9.0f;
    });
    CHECK_THROWS_AS(IncrementalState::init(v, est, constant_image(6, 6, 1, 0.0f)), ConfigError);
    // field size must match the image
    const Kernel v2 = Kernel::varying_field(5, 4, 1, [](int, int, float* t) {
        for (int i = 0; i < 9; ++i) t[i] = 1.0f / 9.0f;
    });
    CHECK_THROWS_AS(IncrementalState::init(v2, est, constant_image(4, 4, 1, 0.0f)), ConfigError);
    // non-finite input
    ImageF bad = est;
    bad.at(1, 1) = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(IncrementalState::init(g, bad, constant_image(6, 6, 1, 0.0f)), NumericError);
}

TEST_CASE("trial deltas match brute-force recomputation") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        CounterRng rng(seed, 10);
        const int w = 5 + int(rng.next_below(5)), h = 5 + int(rng.next_below(5));
        const int radius = 1 + int(rng.next_below(2));
        const bool varying = rng.next_below(2) == 1;
        const ImageF est = random_image(rng, w, h, 1);
        Kernel g;
        ImageF target;
        if (varying) {
            g = random_varying_kernel(rng, w, h, radius);
            target = random_image(rng, w, h, 1, -0.5f, 0.5f);
        } else {
            g = random_uniform_kernel(rng, radius);
            target = random_image(rng, w + 2 * radius, h + 2 * radius, 1, -0.5f, 0.5f);
        }
        IncrementalState s = IncrementalState::init(g, est, target);
        const double e0 = brute_energy_d(to_double(est), w, h, 1, target, g);

        // single update
        PixelDelta u;
        u.x = int(rng.next_below(uint64_t(w)));
        u.y = int(rng.next_below(uint64_t(h)));
        u.d[0] = rng.next_double() - 0.5;
        const double t1 = s.trial_update(u);
        const double b1 =
            brute_energy_d(apply_deltas(est, {u}), w, h, 1, target, g) - e0;
        CHECK(t1 == doctest::Approx(b1).epsilon(1e-9));

        // swap-style pair at nearby pixels (cross terms exercised)
        PixelDelta a, b;
        a.x = int(rng.next_below(uint64_t(w - 1)));
        a.y = int(rng.next_below(uint64_t(h)));
        b.x = a.x + 1;
        b.y = a.y;
        a.d[0] = rng.next_double() - 0.5;
        b.d[0] = -a.d[0];
        const double t2 = s.trial_swap(a, b);
        const double b2 =
            brute_energy_d(apply_deltas(est, {a, b}), w, h, 1, target, g) - e0;
        CHECK(t2 == doctest::Approx(b2).epsilon(1e-9));

        // 3-4 simultaneous updates at random pixels
        std::vector<PixelDelta> ups(3 + rng.next_below(2));
        for (PixelDelta& p : ups) {
            p.x = int(rng.next_below(uint64_t(w)));
            p.y = int(rng.next_below(uint64_t(h)));
            p.d[0] = rng.next_double() - 0.5;
        }
        const double t3 = s.trial_update({ups.data(), ups.size()});
        const double b3 =
            brute_energy_d(apply_deltas(est, ups), w, h, 1, target, g) - e0;
        CHECK(t3 == doctest::Approx(b3).epsilon(1e-9));

        // trial does not mutate
        CHECK(s.energy() == doctest::Approx(e0).epsilon(1e-12));
    }
}

TEST_CASE("accepted deltas keep the energy exact through rebuilds") {
    CounterRng rng(42, 11);
    const int w = 9, h = 8;
    const ImageF est0 = random_image(rng, w, h, 1);
    const Kernel g = random_uniform_kernel(rng, 2);
    const ImageF target = random_image(rng, w + 4, h + 4, 1, -0.5f, 0.5f);

    // tiny fold threshold so the log collapses repeatedly
    IncrementalState s = IncrementalState::init(g, est0, target, {1.0, 1.0, 1.0}, 4);
    std::vector<double> cur = to_double(est0);
    for (int step = 0; step < 40; ++step) {
        std::vector<PixelDelta> ups(1 + rng.next_below(3));
        for (PixelDelta& p : ups) {
            p.x = int(rng.next_below(w));
            p.y = int(rng.next_below(h));
            p.d[0] = rng.next_double() - 0.5;
        }
        s.accept({ups.data(), ups.size()});
        for (const PixelDelta& p : ups) cur[size_t(p.y) * w + p.x] += p.d[0];
        const double want = brute_energy_d(cur, w, h, 1, target, g);
        CHECK(s.energy() == doctest::Approx(want).epsilon(1e-9));
        CHECK(s.log_size() <= 4 + 3);
    }

    // forcing a rebuild changes neither the energy nor future trials
    PixelDelta probe;
    probe.x = 3;
    probe.y = 3;
    probe.d[0] = 0.25;
    const double before = s.trial_update(probe);
    const double e_before = s.energy();
    s.rebuild();
    CHECK(s.log_size() == 0);
    CHECK(s.energy() == e_before);
    CHECK(s.trial_update(probe) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("model-driven initialization agrees with the reference energy") {
    CounterRng rng(5, 12);
    const ImageF est = random_image(rng, 6, 6, 1, -0.2f, 1.2f);
    const ImageF ref = random_image(rng, 6, 6, 1);

    for (ToneMap tm : {ToneMap::Identity, ToneMap::Clamp01, ToneMap::Aces}) {
        PerceptualModel m;
        m.tonemap = tm;
        m.g = Kernel::binomial3();
        m.h = Kernel::delta();
        const IncrementalState s = IncrementalState::init_from_model(est, ref, m);
        CHECK(s.energy() == doctest::Approx(perceptual_energy(est, ref, m)).epsilon(1e-4));
    }

    SUBCASE("non-trivial reference kernel widens the support consistently") {
        PerceptualModel m;
        m.tonemap = ToneMap::Identity;
        m.g = Kernel::binomial3();
        m.h = Kernel::gaussian(1.0, 2);
        const IncrementalState s = IncrementalState::init_from_model(est, ref, m);
        CHECK(s.energy() == doctest::Approx(perceptual_energy(est, ref, m)).epsilon(1e-4));
    }

    SUBCASE("varying display kernel") {
        PerceptualModel m;
        m.tonemap = ToneMap::Identity;
        m.g = random_varying_kernel(rng, 6, 6, 1);
        const IncrementalState s = IncrementalState::init_from_model(est, ref, m);
        CHECK(s.energy() == doctest::Approx(perceptual_energy(est, ref, m)).epsilon(1e-4));
    }

    SUBCASE("trial deltas live in tone-mapped space") {
        PerceptualModel m;
        m.tonemap = ToneMap::Clamp01;
        IncrementalState s = IncrementalState::init_from_model(est, ref, m);
        ImageF est2 = est;
        est2.at(2, 3) = 1.7f;  // clamps to 1
        PixelDelta u;
        u.x = 2;
        u.y = 3;
        u.d[0] = double(tonemap_value(m.tonemap, 1.7f)) -
                 double(tonemap_value(m.tonemap, est.at(2, 3)));
        const double want = perceptual_energy(est2, ref, m) - perceptual_energy(est, ref, m);
        CHECK(s.trial_update(u) == doctest::Approx(want).epsilon(5e-4));
    }

    SUBCASE("unsupported configurations are rejected") {
        PerceptualModel m;
        m.boundary = Boundary::Reflect;
        CHECK_THROWS_AS(IncrementalState::init_from_model(est, ref, m), ConfigError);
        PerceptualModel m2;
        m2.g = random_varying_kernel(rng, 6, 6, 1);
        m2.h = random_varying_kernel(rng, 6, 6, 1);
        CHECK_THROWS_AS(IncrementalState::init_from_model(est, ref, m2), ConfigError);
    }
}

TEST_CASE("three-channel trials honor per-channel weights") {
    CounterRng rng(9, 13);
    const int w = 6, h = 5;
    const ImageF est = random_image(rng, w, h, 3);
    const Kernel g = random_uniform_kernel(rng, 1);
    const ImageF target = random_image(rng, w + 2, h + 2, 3, -0.5f, 0.5f);
    const std::array<double, 3> lambda = {kLumaR, kLumaG, kLumaB};
    IncrementalState s = IncrementalState::init(g, est, target, lambda);
    const double e0 = brute_energy_d(to_double(est), w, h, 3, target, g, lambda);

    PixelDelta u;
    u.x = 2;
    u.y = 2;
    u.d = {0.3, -0.2, 0.1};
    const double want =
        brute_energy_d(apply_deltas(est, {u}), w, h, 3, target, g, lambda) - e0;
    CHECK(s.trial_update(u) == doctest::Approx(want).epsilon(1e-9));
    s.accept(u);
    CHECK(s.energy() == doctest::Approx(e0 + want).epsilon(1e-12));
}
