#pragma once

#include <cstdint>
#include <vector>

#include "pet/image.hpp"
#include "pet/model.hpp"

namespace pet {

// Per-pixel collections of independent estimates (the vertical search
// space). Uniform stacks hold M estimates everywhere; ragged stacks (e.g.
// power-set expansions truncated per pixel) carry explicit offsets.
// Storage is pixel-major: all estimates of a pixel are contiguous.
struct EstimateStack {
    int width = 0;
    int height = 0;
    int channels = 1;
    int m = 0;                      // uniform count; 0 => ragged
    std::vector<float> data;        // uniform: N*m*channels
    std::vector<uint32_t> offsets;  // ragged: N+1 entries into data (in pixels)
    AuxPlanes aux;                  // optional modulation planes

    EstimateStack() = default;
    EstimateStack(int w, int h, int c, int m_)
        : width(w), height(h), channels(c), m(m_),
          data(size_t(w) * h * m_ * c, 0.0f) {}

    bool ragged() const { return m == 0; }
    size_t pixel_count() const { return size_t(width) * height; }

    int count(int x, int y) const {
        if (!ragged()) return m;
        const size_t p = size_t(y) * width + x;
        return int(offsets[p + 1] - offsets[p]);
    }
    float* estimate(int x, int y, int k) {
        const size_t p = size_t(y) * width + x;
        const size_t base = ragged() ? offsets[p] : p * m;
        return &data[(base + k) * channels];
    }
    const float* estimate(int x, int y, int k) const {
        const size_t p = size_t(y) * width + x;
        const size_t base = ragged() ? offsets[p] : p * m;
        return &data[(base + k) * channels];
    }

    // Per-pixel mean of all estimates.
    ImageF mean_image() const;
};

// Which estimate each pixel emits.
struct SelectionImage {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> sel;

    SelectionImage() = default;
    SelectionImage(int w, int h) : width(w), height(h), sel(size_t(w) * h, 0) {}
    uint16_t& at(int x, int y) { return sel[size_t(y) * width + x]; }
    uint16_t at(int x, int y) const { return sel[size_t(y) * width + x]; }
};

// Materializes the selected estimates as an image (raw estimate values;
// each output pixel is bit-identical to one input estimate).
ImageF apply_selection(const EstimateStack& stack, const SelectionImage& sel);

} // namespace pet
