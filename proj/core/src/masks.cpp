#include "pet/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pet/errors.hpp"
#include "pet/rng.hpp"

namespace pet {

void refresh_thresholds(DitherMask& mask) {
    const size_t n = mask.ranks.size();
    mask.thresholds.resize(n);
    for (size_t i = 0; i < n; ++i)
        mask.thresholds[i] = float((mask.ranks[i] + 0.5) / double(n));
}

namespace {

// Toroidally wrapped Gaussian lookup: table[(dy mod H)*W + (dx mod W)] is the
// influence of a minority pixel at offset (dx,dy). Summing the three nearest
// wrapped replicas per axis is plenty at sigma ~1.5.
std::vector<double> wrapped_gaussian(int w, int h, double sigma) {
    std::vector<double> t(size_t(w) * h, 0.0);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int dy = 0; dy < h; ++dy) {
        for (int dx = 0; dx < w; ++dx) {
            double acc = 0.0;
            for (int ry = -1; ry <= 1; ++ry) {
                for (int rx = -1; rx <= 1; ++rx) {
                    const double ddx = dx + rx * w;
                    const double ddy = dy + ry * h;
                    acc += std::exp(-(ddx * ddx + ddy * ddy) * inv);
                }
            }
            t[size_t(dy) * w + dx] = acc;
        }
    }
    return t;
}

struct Field {
    int w, h;
    const std::vector<double>& lut;
    std::vector<double> e;  // sum of wrapped gaussians of all minority pixels

    Field(int w_, int h_, const std::vector<double>& lut_)
        : w(w_), h(h_), lut(lut_), e(size_t(w_) * h_, 0.0) {}

    void add(int px, int py, double sign) {
        for (int y = 0; y < h; ++y) {
            const int dy = (y - py + h) % h;
            const double* lrow = &lut[size_t(dy) * w];
            double* erow = &e[size_t(y) * w];
            for (int x = 0; x < w; ++x) erow[x] += sign * lrow[(x - px + w) % w];
        }
    }
};

// argmax of e over pixels with pattern==value (tightest cluster when
// value==1, largest void via argmin when minimize==true); smallest linear
// index wins ties.
size_t select_pixel(const std::vector<uint8_t>& pattern, const Field& f, uint8_t value,
                    bool minimize) {
    size_t best = SIZE_MAX;
    double best_e = 0.0;
    for (size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != value) continue;
        const double v = f.e[i];
        if (best == SIZE_MAX || (minimize ? v < best_e : v > best_e)) {
            best = i;
            best_e = v;
        }
    }
    return best;
}

} // namespace

DitherMask void_and_cluster(int width, int height, uint64_t seed, double sigma,
                            double initial_density) {
    if (width <= 0 || height <= 0) throw ConfigError("void_and_cluster: bad dimensions");
    if (sigma <= 0.0) throw ConfigError("void_and_cluster: sigma must be positive");
    if (initial_density <= 0.0 || initial_density >= 1.0)
        throw ConfigError("void_and_cluster: density must lie in (0,1)");
    const size_t n = size_t(width) * height;
    const auto lut = wrapped_gaussian(width, height, sigma);
    Field field(width, height, lut);
    std::vector<uint8_t> pattern(n, 0);

    // seed ~density random minority pixels
    size_t ones = std::max<size_t>(1, size_t(std::llround(initial_density * double(n))));
    if (ones >= n) ones = n - 1;
    {
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        CounterRng rng(seed, 0x5eed);
        deterministic_shuffle(idx, rng);
        for (size_t i = 0; i < ones; ++i) {
            pattern[idx[i]] = 1;
            field.add(int(idx[i] % width), int(idx[i] / width), +1.0);
        }
    }

    // relax to a fixed point: move the tightest cluster into the largest void
    // until the removed pixel is itself the destination
    for (size_t guard = 0; guard < 10 * n; ++guard) {
        const size_t cluster = select_pixel(pattern, field, 1, false);
        pattern[cluster] = 0;
        field.add(int(cluster % width), int(cluster / width), -1.0);
        const size_t void_px = select_pixel(pattern, field, 0, true);
        pattern[void_px] = 1;
        field.add(int(void_px % width), int(void_px / width), +1.0);
        if (void_px == cluster) break;
    }

    DitherMask mask;
    mask.width = width;
    mask.height = height;
    mask.ranks.assign(n, 0);

    // phase 1: rank the prototype's minority pixels by successive
    // tightest-cluster removal (ranks ones-1 ... 0)
    {
        std::vector<uint8_t> p = pattern;
        Field f = field;
        for (size_t r = ones; r-- > 0;) {
            const size_t cluster = select_pixel(p, f, 1, false);
            p[cluster] = 0;
            f.add(int(cluster % width), int(cluster / width), -1.0);
            mask.ranks[cluster] = uint32_t(r);
        }
    }

    // phases 2+3: insert into the largest void until full. On a torus the
    // all-ones field is constant, so "largest void of the 1s" and "tightest
    // cluster of the 0s" are the same argmin over zero pixels.
    for (size_t r = ones; r < n; ++r) {
        const size_t void_px = select_pixel(pattern, field, 0, true);
        pattern[void_px] = 1;
        field.add(int(void_px % width), int(void_px / width), +1.0);
        mask.ranks[void_px] = uint32_t(r);
    }

    refresh_thresholds(mask);
    return mask;
}

DitherMask white_noise_mask(int width, int height, uint64_t seed) {
    if (width <= 0 || height <= 0) throw ConfigError("white_noise_mask: bad dimensions");
    DitherMask mask;
    mask.width = width;
    mask.height = height;
    mask.ranks.resize(size_t(width) * height);
    std::iota(mask.ranks.begin(), mask.ranks.end(), 0u);
    CounterRng rng(seed, 0x77u);
    deterministic_shuffle(mask.ranks, rng);
    refresh_thresholds(mask);
    return mask;
}

} // namespace pet
