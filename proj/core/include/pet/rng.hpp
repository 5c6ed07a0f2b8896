#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace pet {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter), so results never depend on thread count or
// evaluation order, and any pixel's stream can be opened independently.

inline uint64_t mix64(uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0) : key_(mix64(seed ^ mix64(stream))) {}

    uint64_t next_u64() { return mix64(key_ ^ ctr_++); }

    // uniform in [0,1)
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
    float next_float() { return float(next_u64() >> 40) * 0x1.0p-24f; }

    // uniform integer in [0,n), rejection sampled so the result does not
    // depend on any library's distribution implementation
    uint64_t next_below(uint64_t n) {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // standard normal via Box-Muller (two draws per pair, cached)
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t key_ = 0;
    uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream ids: one per (pixel, plane) so per-pixel generation is order- and
// thread-invariant.
inline CounterRng pixel_rng(uint64_t seed, int x, int y, uint64_t plane = 0) {
    const uint64_t stream = (uint64_t(uint32_t(y)) << 32 | uint32_t(x)) ^ (plane * 0x9e3779b97f4a7c15ull);
    return CounterRng(seed, stream);
}

// Deterministic Fisher-Yates shuffle (independent of std::shuffle's
// unspecified algorithm).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, CounterRng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = size_t(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace pet
