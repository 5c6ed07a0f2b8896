#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pet/image.hpp"
#include "pet/model.hpp"

namespace pet {

// Centered power spectrum |F(img - mean)|^2. DC sits at (W/2, H/2) and is
// zero because the mean is subtracted before the transform. Multi-channel
// images are collapsed to luminance first. Power-of-two dimensions go
// through an iterative radix-2 FFT; anything else takes the direct DFT
// (desk-scale images keep that affordable).
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<double> power;

    double at(int kx, int ky) const { return power[size_t(ky) * width + kx]; }
    // Centered frequency of a bin, in cycles/pixel per axis.
    double fx(int kx) const { return double(kx - width / 2) / width; }
    double fy(int ky) const { return double(ky - height / 2) / height; }
};

Spectrum power_spectrum(const ImageF& img);

// 1D helpers exposed for testing: forward transform, unnormalized
// X_k = sum_n x_n exp(-2*pi*i*k*n/N).
void dft_1d(std::vector<std::complex<double>>& data);

// Mean radial profile: non-DC coefficients partition into `bins` annuli by
// normalized frequency radius sqrt(fx^2+fy^2) in [0, f_max]. Returns
// (bin center radius, mean power, count).
struct RadialBin {
    double radius = 0.0;
    double mean_power = 0.0;
    size_t count = 0;
};
std::vector<RadialBin> radial_average(const Spectrum& s, int bins);

// Fraction of total (DC-excluded) power at radius <= cutoff cycles/pixel.
// For white noise this approaches the disk's area fraction pi*cutoff^2.
double low_freq_ratio(const ImageF& err, double cutoff);

// Sum of power with f_lo < radius <= f_hi (cycles/pixel).
double band_power(const Spectrum& s, double f_lo, double f_hi);

// Standard analysis bands: the lowest octave reaches 0.125 cycles/px, the
// highest starts at 0.25 (Nyquist = 0.5).
inline double lowest_octave_power(const Spectrum& s) { return band_power(s, 0.0, 0.125); }
inline double highest_octave_power(const Spectrum& s) { return band_power(s, 0.25, 1.0); }

// Per-tile spectra composited in place, each tile log-mapped by
// c*ln(1+|F|) with c chosen per tile so the maximum becomes 1 (all-zero
// tiles stay black). Uses amplitude, not power; tile DCs are blanked.
ImageF tiled_spectrum(const ImageF& err, int tile = 32);

// Side-by-side metric table for candidate images against one reference.
struct CompareRow {
    std::string name;
    double mse = 0.0;
    double pmse = 0.0;
    double low_freq = 0.0;  // low_freq_ratio of the error at cutoff 0.125
    double energy = 0.0;
};

// Rows come back sorted by ascending pMSE.
std::vector<CompareRow> compare_report(const std::vector<std::string>& names,
                                       const std::vector<const ImageF*>& images,
                                       const ImageF& reference, const PerceptualModel& m);

// Fixed-width text rendering of a compare table.
std::string format_compare_table(const std::vector<CompareRow>& rows);

} // namespace pet
