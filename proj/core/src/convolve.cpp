#include "pet/convolve.hpp"

#include <algorithm>

#include "pet/errors.hpp"

namespace pet {

ImageF convolve(const ImageF& img, const Kernel& k, Boundary boundary) {
    if (k.varying && (k.field_width != img.width || k.field_height != img.height))
        throw ConfigError("convolve: varying kernel field does not match image size");
    const int W = img.width, H = img.height, C = img.channels, K = k.radius;
    ImageF out(W, H, C);
    parallel_rows(H, [&](int y) {
        for (int x = 0; x < W; ++x) {
            const float* table = k.table_at(x, y);
            float* dst = out.pixel(x, y);
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int vy = -K; vy <= K; ++vy) {
                    for (int vx = -K; vx <= K; ++vx) {
                        int sx = x - vx, sy = y - vy;
                        if (boundary == Boundary::Reflect) {
                            sx = reflect_index(sx, W);
                            sy = reflect_index(sy, H);
                        } else if (sx < 0 || sx >= W || sy < 0 || sy >= H) {
                            continue;
                        }
                        acc += double(k.w(table, vx, vy)) * double(img.at(sx, sy, c));
                    }
                }
                dst[c] = float(acc);
            }
        }
    });
    return out;
}

ImageF convolve_full(const ImageF& img, const Kernel& k, int pad) {
    if (k.varying)
        throw ConfigError("convolve_full: varying kernels have no extended support");
    const int K = k.radius;
    const int P = pad < 0 ? K : std::max(pad, K);
    const int W = img.width, H = img.height, C = img.channels;
    ImageF out(W + 2 * P, H + 2 * P, C);
    parallel_rows(out.height, [&](int oy) {
        const int y = oy - P;
        for (int ox = 0; ox < out.width; ++ox) {
            const int x = ox - P;
            float* dst = out.pixel(ox, oy);
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int vy = -K; vy <= K; ++vy) {
                    const int sy = y - vy;
                    if (sy < 0 || sy >= H) continue;
                    for (int vx = -K; vx <= K; ++vx) {
                        const int sx = x - vx;
                        if (sx < 0 || sx >= W) continue;
                        acc += double(k.w(k.weights.data(), vx, vy)) * double(img.at(sx, sy, c));
                    }
                }
                dst[c] = float(acc);
            }
        }
    });
    return out;
}

} // namespace pet
