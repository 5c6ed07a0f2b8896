#pragma once

#include <functional>
#include <vector>

namespace pet {

// Square convolution kernel of radius K: (2K+1)^2 weights, row-major with
// the origin at the center. Two flavors:
//   - uniform: one weight table shared by every output pixel;
//   - spatially varying: one table per pixel of a fixed image size.
// For a varying kernel the filtered value at pixel i is
//   out_i = sum_v w_i(v) * in(i - v),
// i.e. table entry v is the weight of the input pixel at offset -v.
struct Kernel {
    int radius = 0;
    bool varying = false;
    std::vector<float> weights;  // uniform: (2K+1)^2; varying: W*H*(2K+1)^2
    int field_width = 0;         // varying only
    int field_height = 0;

    int diameter() const { return 2 * radius + 1; }
    int table_size() const { return diameter() * diameter(); }

    // Weight table for output pixel (x,y); uniform kernels ignore the pixel.
    const float* table_at(int x, int y) const {
        if (!varying) return weights.data();
        return &weights[(size_t(y) * field_width + x) * table_size()];
    }
    float w(const float* table, int vx, int vy) const {
        return table[(vy + radius) * diameter() + (vx + radius)];
    }

    // Sum of weights / sum of |weights| of the uniform table.
    double l1() const;
    double sum() const;

    // Identity kernel (radius 0, single weight 1).
    static Kernel delta();

    // 3x3 binomial [1 2 1]x[1 2 1]/16. Its exact discrete per-axis stddev is
    // sqrt(0.5) ~= 0.7071; the commonly quoted Gaussian fit uses
    // sigma = sqrt(2/pi) ~= 0.7979 (request Kernel::gaussian for that).
    static Kernel binomial3();

    // Sampled Gaussian, truncated at radius (default ceil(3*sigma)) and
    // renormalized to sum 1.
    static Kernel gaussian(double sigma, int radius = -1);

    // delta - gaussian(sigma): a zero-sum high-pass target kernel.
    static Kernel highpass(double sigma, int radius = -1);

    // Anisotropic Gaussian with per-axis sigmas, normalized to sum 1.
    static Kernel gaussian_aniso(double sigma_x, double sigma_y, int radius = -1);

    // Spatially varying kernel: fn(x,y) must fill a (2K+1)^2 table.
    static Kernel varying_field(int w, int h, int radius,
                                const std::function<void(int, int, float*)>& fn);

    // Horizontal blend between two same-radius kernels: at column x the
    // table is lerp(a, b, x/(w-1)).
    static Kernel blend_horizontal(const Kernel& a, const Kernel& b, int w, int h);
};

// Display/viewing geometry. dpi is the display resolution, distance the view
// distance in inches; the kernel stddev (in pixels) models the eye's
// point-spread at that geometry. The two functions are inverses.
double sigma_from_viewing(double dpi, double distance_inches);
double distance_from_sigma(double dpi, double sigma);

} // namespace pet
