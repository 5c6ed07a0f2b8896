#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pet {

// Planar-agnostic float image: row-major, channel-interleaved storage.
// Channels is 1 (scalar) or 3 (RGB); energies are always accumulated in
// double even though storage is single precision.
struct ImageF {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    ImageF() = default;
    ImageF(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), data(size_t(w) * h * c, fill) {}

    float& at(int x, int y, int c = 0) { return data[(size_t(y) * width + x) * channels + c]; }
    float at(int x, int y, int c = 0) const { return data[(size_t(y) * width + x) * channels + c]; }

    float* pixel(int x, int y) { return &data[(size_t(y) * width + x) * channels]; }
    const float* pixel(int x, int y) const { return &data[(size_t(y) * width + x) * channels]; }

    size_t pixel_count() const { return size_t(width) * height; }
    size_t value_count() const { return data.size(); }
    bool empty() const { return data.empty(); }
    bool same_shape(const ImageF& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Rec.709 luma weights.
inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

// Scalar images pass through unchanged (copy); RGB collapses via Rec.709.
ImageF luminance(const ImageF& img);

inline double luminance_of(const float* px, int channels) {
    if (channels == 1) return px[0];
    return kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2];
}

// Plain per-value mean squared error (no kernel, no tone map).
double mse(const ImageF& a, const ImageF& b);

// a - b, elementwise.
ImageF difference(const ImageF& a, const ImageF& b);

ImageF constant_image(int w, int h, int c, float value);

// True iff every value is finite.
bool all_finite(const ImageF& img);

// Worker count used by row-parallel loops (convolution). Parallelism never
// changes results: each output pixel is computed independently.
void set_thread_count(int n);
int thread_count();

// Runs fn(y) for y in [0,rows) split across the configured workers.
void parallel_rows(int rows, const std::function<void(int)>& fn);

} // namespace pet
