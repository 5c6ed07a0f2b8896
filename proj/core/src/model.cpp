#include "pet/model.hpp"

#include <algorithm>
#include <cmath>

#include "pet/errors.hpp"

namespace pet {

float tonemap_value(ToneMap tm, float v) {
    switch (tm) {
        case ToneMap::Identity:
            return v;
        case ToneMap::Clamp01:
            return std::min(1.0f, std::max(0.0f, v));
        case ToneMap::Aces: {
            // fitted rational approximation of the ACES RRT+ODT curve
            const float a = 2.51f, b = 0.03f, c = 2.43f, d = 0.59f, e = 0.14f;
            const float x = std::max(0.0f, v);
            const float y = (x * (a * x + b)) / (x * (c * x + d) + e);
            return std::min(1.0f, std::max(0.0f, y));
        }
    }
    return v;
}

ImageF tonemap_image(ToneMap tm, const ImageF& img) {
    if (tm == ToneMap::Identity) return img;
    ImageF out = img;
    for (float& v : out.data) v = tonemap_value(tm, v);
    return out;
}

ImageF demodulate(const ImageF& est, const AuxPlanes& aux) {
    ImageF out = est;
    const bool has_a = !aux.alpha.empty(), has_b = !aux.beta.empty();
    if (has_a && !aux.alpha.same_shape(est))
        throw ConfigError("demodulate: alpha shape mismatch");
    if (has_b && !aux.beta.same_shape(est))
        throw ConfigError("demodulate: beta shape mismatch");
    for (size_t i = 0; i < out.data.size(); ++i) {
        float v = out.data[i];
        if (has_b) v -= aux.beta.data[i];
        if (has_a) v /= std::max(aux.alpha.data[i], kAlphaFloor);
        out.data[i] = v;
    }
    return out;
}

ImageF remodulate(const ImageF& demod, const AuxPlanes& aux) {
    ImageF out = demod;
    const bool has_a = !aux.alpha.empty(), has_b = !aux.beta.empty();
    if (has_a && !aux.alpha.same_shape(demod))
        throw ConfigError("remodulate: alpha shape mismatch");
    if (has_b && !aux.beta.same_shape(demod))
        throw ConfigError("remodulate: beta shape mismatch");
    for (size_t i = 0; i < out.data.size(); ++i) {
        float v = out.data[i];
        if (has_a) v *= std::max(aux.alpha.data[i], kAlphaFloor);
        if (has_b) v += aux.beta.data[i];
        out.data[i] = v;
    }
    return out;
}

namespace {

// Filters est with g and ref with h on a common support and accumulates the
// weighted squared difference.
double energy_impl(const ImageF& est, const ImageF& ref, const PerceptualModel& m) {
    if (!est.same_shape(ref)) throw ConfigError("perceptual_energy: shape mismatch");
    if (!all_finite(est) || !all_finite(ref))
        throw NumericError("perceptual_energy: non-finite input");
    const ImageF te = tonemap_image(m.tonemap, est);
    const ImageF tr = tonemap_image(m.tonemap, ref);

    ImageF ge, hr;
    if (m.boundary == Boundary::Reflect) {
        ge = convolve(te, m.g, Boundary::Reflect);
        hr = convolve(tr, m.h, Boundary::Reflect);
    } else if (m.g.varying) {
        // varying kernels have no extended support; the energy lives on the
        // image support, reads beyond the border are zero
        ge = convolve(te, m.g, Boundary::LeakyZeroPad);
        hr = convolve(tr, m.h, Boundary::LeakyZeroPad);
    } else {
        const int pad = std::max(m.g.radius, m.h.radius);
        ge = convolve_full(te, m.g, pad);
        hr = convolve_full(tr, m.h, pad);
    }

    double acc = 0.0;
    const int C = est.channels;
    for (size_t p = 0; p < ge.pixel_count(); ++p)
        for (int c = 0; c < C; ++c) {
            const double d = double(ge.data[p * C + c]) - double(hr.data[p * C + c]);
            acc += m.lambda[size_t(c)] * d * d;
        }
    if (!std::isfinite(acc)) throw NumericError("perceptual_energy: non-finite energy");
    return acc;
}

} // namespace

double perceptual_energy(const ImageF& est, const ImageF& ref, const PerceptualModel& m) {
    return energy_impl(est, ref, m);
}

double pmse(const ImageF& est, const ImageF& ref, const PerceptualModel& m) {
    return perceptual_energy(est, ref, m) /
           (double(est.pixel_count()) * double(est.channels));
}

double confidence_energy(const ImageF& est, const ImageF& est_init,
                         const ImageF& surrogate, const PerceptualModel& m) {
    if (!est.same_shape(est_init)) throw ConfigError("confidence_energy: shape mismatch");
    if (m.confidence < 0.0 || m.confidence > 1.0)
        throw ConfigError("confidence_energy: confidence must lie in [0,1]");
    double dev2 = 0.0;
    for (size_t i = 0; i < est.data.size(); ++i) {
        const double d = double(est.data[i]) - double(est_init.data[i]);
        dev2 += d * d;
    }
    const double root = (1.0 - m.confidence) * m.g.l1() * std::sqrt(dev2) +
                        m.confidence * std::sqrt(perceptual_energy(est, surrogate, m));
    return root * root;
}

double apriori_energy(const std::vector<ImageF>& estimates,
                      const std::vector<ImageF>& references,
                      const std::vector<double>& weights, const PerceptualModel& m) {
    if (estimates.size() != references.size() || estimates.size() != weights.size())
        throw ConfigError("apriori_energy: mismatched integrand counts");
    double acc = 0.0;
    for (size_t t = 0; t < estimates.size(); ++t) {
        if (weights[t] == 0.0) continue;
        acc += weights[t] * perceptual_energy(estimates[t], references[t], m);
    }
    return acc;
}

double progressive_apriori_energy(const std::vector<std::vector<ImageF>>& estimates,
                                  const std::vector<ImageF>& references,
                                  const std::vector<std::vector<double>>& weights,
                                  const PerceptualModel& m) {
    if (estimates.size() != references.size() || estimates.size() != weights.size())
        throw ConfigError("progressive_apriori_energy: mismatched integrand counts");
    double acc = 0.0;
    for (size_t t = 0; t < estimates.size(); ++t) {
        if (estimates[t].size() != weights[t].size())
            throw ConfigError("progressive_apriori_energy: mismatched prefix counts");
        for (size_t k = 0; k < estimates[t].size(); ++k) {
            if (weights[t][k] == 0.0) continue;
            acc += weights[t][k] * perceptual_energy(estimates[t][k], references[t], m);
        }
    }
    return acc;
}

} // namespace pet
