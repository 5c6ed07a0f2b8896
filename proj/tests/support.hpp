#pragma once

// Brute-force reference implementations used as test oracles. Everything here
// is written as plain nested loops in double precision with no incremental
// shortcuts, deliberately independent of the library's optimized code paths.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pet/convolve.hpp"
#include "pet/image.hpp"
#include "pet/kernel.hpp"
#include "pet/rng.hpp"

namespace testsup {

using namespace pet;

inline double sq(double v) { return v * v; }

inline ImageF random_image(CounterRng& rng, int w, int h, int c, float lo = 0.0f,
                           float hi = 1.0f) {
    ImageF img(w, h, c);
    for (float& v : img.data) v = lo + (hi - lo) * rng.next_float();
    return img;
}

inline Kernel random_uniform_kernel(CounterRng& rng, int radius, bool signed_weights = true) {
    Kernel k;
    k.radius = radius;
    k.weights.resize(size_t(k.diameter()) * k.diameter());
    for (float& w : k.weights)
        w = signed_weights ? rng.next_float() * 1.5f - 0.5f : rng.next_float();
    return k;
}

inline Kernel random_varying_kernel(CounterRng& rng, int w, int h, int radius) {
    Kernel k;
    k.radius = radius;
    k.varying = true;
    k.field_width = w;
    k.field_height = h;
    k.weights.resize(size_t(w) * h * k.table_size());
    for (float& v : k.weights) v = rng.next_float();
    return k;
}

// Same-size convolution oracle: out_i = sum_v w(v) * in(i - v).
inline ImageF brute_convolve(const ImageF& in, const Kernel& k, Boundary b) {
    ImageF out(in.width, in.height, in.channels);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            const float* table = k.table_at(x, y);
            for (int c = 0; c < in.channels; ++c) {
                double acc = 0.0;
                for (int vy = -k.radius; vy <= k.radius; ++vy)
                    for (int vx = -k.radius; vx <= k.radius; ++vx) {
                        int sx = x - vx, sy = y - vy;
                        if (b == Boundary::Reflect) {
                            sx = reflect_index(sx, in.width);
                            sy = reflect_index(sy, in.height);
                        } else if (sx < 0 || sx >= in.width || sy < 0 || sy >= in.height) {
                            continue;
                        }
                        acc += double(k.w(table, vx, vy)) * double(in.at(sx, sy, c));
                    }
                out.at(x, y, c) = float(acc);
            }
        }
    return out;
}

// Extended-support (zero pad) convolution oracle in double precision.
// Output index (ox,oy) corresponds to image position (ox-P, oy-P).
inline std::vector<double> brute_convolve_full_d(const std::vector<double>& in, int w, int h,
                                                 int channels, const Kernel& k, int P) {
    const int sw = w + 2 * P, sh = h + 2 * P;
    std::vector<double> out(size_t(sw) * sh * channels, 0.0);
    for (int oy = 0; oy < sh; ++oy)
        for (int ox = 0; ox < sw; ++ox)
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int vy = -k.radius; vy <= k.radius; ++vy)
                    for (int vx = -k.radius; vx <= k.radius; ++vx) {
                        const int sx = ox - P - vx, sy = oy - P - vy;
                        if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
                        acc += double(k.w(k.weights.data(), vx, vy)) *
                               in[(size_t(sy) * w + sx) * channels + c];
                    }
                out[(size_t(oy) * sw + ox) * channels + c] = acc;
            }
    return out;
}

// Same-size leaky convolution oracle in double precision (uniform or varying).
inline std::vector<double> brute_convolve_leaky_d(const std::vector<double>& in, int w, int h,
                                                  int channels, const Kernel& k) {
    std::vector<double> out(size_t(w) * h * channels, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float* table = k.table_at(x, y);
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int vy = -k.radius; vy <= k.radius; ++vy)
                    for (int vx = -k.radius; vx <= k.radius; ++vx) {
                        const int sx = x - vx, sy = y - vy;
                        if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
                        acc += double(k.w(table, vx, vy)) * in[(size_t(sy) * w + sx) * channels + c];
                    }
                out[(size_t(y) * w + x) * channels + c] = acc;
            }
        }
    return out;
}

inline std::vector<double> to_double(const ImageF& img) {
    return std::vector<double>(img.data.begin(), img.data.end());
}

// Quadratic-form energy oracle: sum_c lambda_c || g*est_c - target_c ||^2 over
// the support implied by the kernel flavor (extended for uniform, image for
// varying). `est` is given as doubles so that modified estimates can be
// evaluated without float re-rounding.
inline double brute_energy_d(const std::vector<double>& est, int w, int h, int channels,
                             const ImageF& target, const Kernel& g,
                             std::array<double, 3> lambda = {1.0, 1.0, 1.0}) {
    std::vector<double> conv;
    if (!g.varying) {
        const int P = (target.width - w) / 2;
        conv = brute_convolve_full_d(est, w, h, channels, g, P);
    } else {
        conv = brute_convolve_leaky_d(est, w, h, channels, g);
    }
    double e = 0.0;
    for (size_t i = 0; i < conv.size(); ++i)
        e += lambda[i % size_t(channels)] * sq(conv[i] - double(target.data[i]));
    return e;
}

} // namespace testsup
