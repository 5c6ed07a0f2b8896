#pragma once

#include <array>
#include <vector>

#include "pet/convolve.hpp"
#include "pet/image.hpp"
#include "pet/kernel.hpp"

namespace pet {

// Tone curve applied to both arms of the energy before filtering.
enum class ToneMap { Identity, Clamp01, Aces };

float tonemap_value(ToneMap tm, float v);
ImageF tonemap_image(ToneMap tm, const ImageF& img);

// The perceptual error model: E = sum_c lambda_c ||g*T(est_c) - h*T(ref_c)||^2.
// g is the display/visual kernel, h the reference kernel (delta by default),
// T the tone map, lambda per-channel weights. confidence in [0,1] blends a
// stay-close-to-initial term into optimization (1 = pure surrogate energy).
struct PerceptualModel {
    Kernel g = Kernel::binomial3();
    Kernel h = Kernel::delta();
    ToneMap tonemap = ToneMap::Clamp01;
    Boundary boundary = Boundary::LeakyZeroPad;
    std::array<double, 3> lambda = {1.0, 1.0, 1.0};
    double confidence = 1.0;
};

// Multiplicative/additive decomposition est = alpha (.) demod + beta used to
// optimize textured images in a flat domain. Either plane may be empty
// (treated as alpha=1 / beta=0).
struct AuxPlanes {
    ImageF alpha;
    ImageF beta;
    bool empty() const { return alpha.empty() && beta.empty(); }
};

// Alpha floor used by demodulate to avoid dividing by ~0.
inline constexpr float kAlphaFloor = 1e-3f;

ImageF demodulate(const ImageF& est, const AuxPlanes& aux);
ImageF remodulate(const ImageF& demod, const AuxPlanes& aux);

// E as defined above, summed over the kernel-extended support (leaky) or the
// image support (reflect). Throws NumericError on non-finite inputs/result.
double perceptual_energy(const ImageF& est, const ImageF& ref, const PerceptualModel& m);

// E / (pixel count * channel count).
double pmse(const ImageF& est, const ImageF& ref, const PerceptualModel& m);

// Confidence-weighted energy E_C with
//   sqrt(E_C) = (1-C)*||g||_1*||est - est_init||_2 + C*sqrt(E(est, surrogate)).
// Returns E_C (the square).
double confidence_energy(const ImageF& est, const ImageF& est_init,
                         const ImageF& surrogate, const PerceptualModel& m);

// A-priori energies: several integrands share one sample layout.
//   E = sum_t w_t * E(est_t, ref_t)
double apriori_energy(const std::vector<ImageF>& estimates,
                      const std::vector<ImageF>& references,
                      const std::vector<double>& weights, const PerceptualModel& m);

// Progressive variant: est[t][k] is the k-th prefix estimate (running mean
// over the first k+1 samples) of integrand t,
//   E = sum_t sum_k w[t][k] * E(est[t][k], ref_t).
// Zero weights for all but the final prefix recovers the plain energy.
double progressive_apriori_energy(const std::vector<std::vector<ImageF>>& estimates,
                                  const std::vector<ImageF>& references,
                                  const std::vector<std::vector<double>>& weights,
                                  const PerceptualModel& m);

} // namespace pet
