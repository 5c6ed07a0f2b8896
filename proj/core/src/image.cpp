#include "pet/image.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pet/errors.hpp"

namespace pet {

ImageF luminance(const ImageF& img) {
    if (img.channels == 1) return img;
    if (img.channels != 3)
        throw ConfigError("luminance: expected 1 or 3 channels");
    ImageF out(img.width, img.height, 1);
    for (size_t p = 0; p < img.pixel_count(); ++p) {
        const float* px = &img.data[p * 3];
        out.data[p] = float(kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2]);
    }
    return out;
}

double mse(const ImageF& a, const ImageF& b) {
    if (!a.same_shape(b)) throw ConfigError("mse: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = double(a.data[i]) - double(b.data[i]);
        acc += d * d;
    }
    return acc / double(a.data.size());
}

ImageF difference(const ImageF& a, const ImageF& b) {
    if (!a.same_shape(b)) throw ConfigError("difference: shape mismatch");
    ImageF out(a.width, a.height, a.channels);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

ImageF constant_image(int w, int h, int c, float value) { return ImageF(w, h, c, value); }

bool all_finite(const ImageF& img) {
    return std::all_of(img.data.begin(), img.data.end(),
                       [](float v) { return std::isfinite(v); });
}

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }
int thread_count() { return g_threads.load(); }

void parallel_rows(int rows, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_count(), rows);
    if (workers <= 1) {
        for (int y = 0; y < rows; ++y) fn(y);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (int y = next.fetch_add(1); y < rows; y = next.fetch_add(1)) fn(y);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace pet
