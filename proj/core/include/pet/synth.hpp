#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pet/image.hpp"
#include "pet/model.hpp"
#include "pet/stack.hpp"

namespace pet {

// Analytic integrand bank for sample-space (a-priori) optimization.
// Heaviside: f_t(x) = 1[x >= a_t], reference integral 1 - a_t.
// Linear: f(x) = x, reference integral 0.5.
struct IntegrandBank {
    enum class Kind { Heaviside, Linear } kind = Kind::Linear;
    std::vector<double> thresholds;  // Heaviside only, one per integrand

    int count() const { return kind == Kind::Linear ? 1 : int(thresholds.size()); }
    double evaluate(int t, double x) const;
    double reference(int t) const;
};

IntegrandBank make_heaviside_bank(int count, uint64_t seed);
IntegrandBank make_linear_bank();

// Synthetic scene description. All randomness flows through counter-based
// per-pixel streams of `seed`, so generation is independent of evaluation
// order and thread count.
struct SceneSpec {
    enum class Kind {
        Constant,        // reference = value; estimates = value + noise
        Ramp,            // reference = x/(W-1); estimates = reference + noise
        Binary,          // estimates in {0,1}, P(1) = density; reference = density
        SineMul,         // alpha = 0.5*(1+sin(freq*(x+y))); estimates = alpha*W,
                         // W ~ U[0,2] (mean 1); reference = 0.5; aux = (alpha, 0)
        SineAdd,         // reference = 0.5*(1+sin(freq*(x+y))); estimates =
                         // reference + noise; aux = (1, reference)
        HeavisideBank,   // stack holds raw 1D samples in [0,1); bank attached
        LinearIntegrand  // stack holds raw samples; bank = {linear}; ref = 0.5
    } kind = Kind::Constant;

    enum class Noise { Uniform, Gaussian, Binary } noise = Noise::Uniform;

    int width = 64;
    int height = 64;
    int channels = 1;
    int m = 1;               // estimates (or samples) per pixel
    double value = 0.5;      // Constant level
    double density = 0.5;    // Binary P(1)
    double frequency = 1.0;  // sine phase advance per pixel step (radians)
    double noise_amplitude = 0.0;  // Uniform half-range / Gaussian sigma
    int bank_count = 4;      // HeavisideBank size
    uint64_t seed = 0;

    static SceneSpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct SynthResult {
    EstimateStack stack;   // aux planes attached when the scene has them
    ImageF reference;
    IntegrandBank bank;    // meaningful for the sample-space kinds
    bool has_bank = false;
};

SynthResult generate(const SceneSpec& spec);

} // namespace pet
