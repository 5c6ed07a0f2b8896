#include "pet/synth.hpp"

#include <cmath>

#include <json.hpp>

#include "pet/errors.hpp"
#include "pet/rng.hpp"

namespace pet {

using nlohmann::json;

double IntegrandBank::evaluate(int t, double x) const {
    if (kind == Kind::Linear) return x;
    return x >= thresholds[size_t(t)] ? 1.0 : 0.0;
}

double IntegrandBank::reference(int t) const {
    if (kind == Kind::Linear) return 0.5;
    return 1.0 - thresholds[size_t(t)];
}

IntegrandBank make_heaviside_bank(int count, uint64_t seed) {
    if (count <= 0) throw ConfigError("heaviside bank: count must be positive");
    IntegrandBank bank;
    bank.kind = IntegrandBank::Kind::Heaviside;
    bank.thresholds.resize(size_t(count));
    CounterRng rng(seed, 0xba2c);
    for (double& a : bank.thresholds) a = rng.next_double();
    return bank;
}

IntegrandBank make_linear_bank() {
    IntegrandBank bank;
    bank.kind = IntegrandBank::Kind::Linear;
    return bank;
}

namespace {

const char* kind_name(SceneSpec::Kind k) {
    switch (k) {
        case SceneSpec::Kind::Constant: return "constant";
        case SceneSpec::Kind::Ramp: return "ramp";
        case SceneSpec::Kind::Binary: return "binary";
        case SceneSpec::Kind::SineMul: return "sine_mul";
        case SceneSpec::Kind::SineAdd: return "sine_add";
        case SceneSpec::Kind::HeavisideBank: return "heaviside_bank";
        case SceneSpec::Kind::LinearIntegrand: return "linear_integrand";
    }
    return "constant";
}

SceneSpec::Kind kind_from_name(const std::string& s) {
    if (s == "constant") return SceneSpec::Kind::Constant;
    if (s == "ramp") return SceneSpec::Kind::Ramp;
    if (s == "binary") return SceneSpec::Kind::Binary;
    if (s == "sine_mul") return SceneSpec::Kind::SineMul;
    if (s == "sine_add") return SceneSpec::Kind::SineAdd;
    if (s == "heaviside_bank") return SceneSpec::Kind::HeavisideBank;
    if (s == "linear_integrand") return SceneSpec::Kind::LinearIntegrand;
    throw ConfigError("scene spec: unknown kind '" + s + "'");
}

const char* noise_name(SceneSpec::Noise n) {
    switch (n) {
        case SceneSpec::Noise::Uniform: return "uniform";
        case SceneSpec::Noise::Gaussian: return "gaussian";
        case SceneSpec::Noise::Binary: return "binary";
    }
    return "uniform";
}

SceneSpec::Noise noise_from_name(const std::string& s) {
    if (s == "uniform") return SceneSpec::Noise::Uniform;
    if (s == "gaussian") return SceneSpec::Noise::Gaussian;
    if (s == "binary") return SceneSpec::Noise::Binary;
    throw ConfigError("scene spec: unknown noise '" + s + "'");
}

// Zero-mean noise draw for a (pixel, estimate, channel) slot.
double noise_draw(const SceneSpec& spec, CounterRng& rng) {
    switch (spec.noise) {
        case SceneSpec::Noise::Uniform:
            return spec.noise_amplitude * (2.0 * rng.next_double() - 1.0);
        case SceneSpec::Noise::Gaussian:
            return spec.noise_amplitude * rng.next_gaussian();
        case SceneSpec::Noise::Binary:
            return spec.noise_amplitude * (rng.next_double() < 0.5 ? -1.0 : 1.0);
    }
    return 0.0;
}

} // namespace

SceneSpec SceneSpec::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene spec: invalid JSON: ") + e.what());
    }
    SceneSpec s;
    try {
        if (j.contains("kind")) s.kind = kind_from_name(j["kind"].get<std::string>());
        if (j.contains("width")) s.width = j["width"].get<int>();
        if (j.contains("height")) s.height = j["height"].get<int>();
        if (j.contains("channels")) s.channels = j["channels"].get<int>();
        if (j.contains("m")) s.m = j["m"].get<int>();
        if (j.contains("value")) s.value = j["value"].get<double>();
        if (j.contains("density")) s.density = j["density"].get<double>();
        if (j.contains("frequency")) s.frequency = j["frequency"].get<double>();
        if (j.contains("noise")) s.noise = noise_from_name(j["noise"].get<std::string>());
        if (j.contains("noise_amplitude")) s.noise_amplitude = j["noise_amplitude"].get<double>();
        if (j.contains("bank_count")) s.bank_count = j["bank_count"].get<int>();
        if (j.contains("seed")) s.seed = j["seed"].get<uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene spec: bad field: ") + e.what());
    }
    if (s.width <= 0 || s.height <= 0) throw ConfigError("scene spec: bad dimensions");
    if (s.channels != 1 && s.channels != 3) throw ConfigError("scene spec: channels must be 1 or 3");
    if (s.m <= 0) throw ConfigError("scene spec: m must be positive");
    return s;
}

std::string SceneSpec::to_json_text() const {
    json j;
    j["kind"] = kind_name(kind);
    j["width"] = width;
    j["height"] = height;
    j["channels"] = channels;
    j["m"] = m;
    j["value"] = value;
    j["density"] = density;
    j["frequency"] = frequency;
    j["noise"] = noise_name(noise);
    j["noise_amplitude"] = noise_amplitude;
    j["bank_count"] = bank_count;
    j["seed"] = seed;
    return j.dump(2);
}

SynthResult generate(const SceneSpec& spec) {
    SynthResult r;
    const int W = spec.width, H = spec.height, C = spec.channels, M = spec.m;
    r.stack = EstimateStack(W, H, C, M);
    r.reference = ImageF(W, H, C);

    switch (spec.kind) {
        case SceneSpec::Kind::Constant:
        case SceneSpec::Kind::Ramp: {
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const double ref =
                        spec.kind == SceneSpec::Kind::Constant
                            ? spec.value
                            : (W > 1 ? double(x) / double(W - 1) : 0.0);
                    for (int c = 0; c < C; ++c) r.reference.at(x, y, c) = float(ref);
                    CounterRng rng = pixel_rng(spec.seed, x, y);
                    for (int k = 0; k < M; ++k) {
                        float* e = r.stack.estimate(x, y, k);
                        for (int c = 0; c < C; ++c)
                            e[c] = float(ref + noise_draw(spec, rng));
                    }
                }
            break;
        }
        case SceneSpec::Kind::Binary: {
            if (spec.density < 0.0 || spec.density > 1.0)
                throw ConfigError("scene spec: density must lie in [0,1]");
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    for (int c = 0; c < C; ++c) r.reference.at(x, y, c) = float(spec.density);
                    CounterRng rng = pixel_rng(spec.seed, x, y);
                    for (int k = 0; k < M; ++k) {
                        float* e = r.stack.estimate(x, y, k);
                        for (int c = 0; c < C; ++c)
                            e[c] = rng.next_double() < spec.density ? 1.0f : 0.0f;
                    }
                }
            break;
        }
        case SceneSpec::Kind::SineMul: {
            // estimate = alpha * W with W ~ U[0,2] (mean 1); the analytic
            // reference is flat grey, the modulation goes into aux.alpha
            r.stack.aux.alpha = ImageF(W, H, C);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const double alpha = 0.5 * (1.0 + std::sin(spec.frequency * double(x + y)));
                    for (int c = 0; c < C; ++c) {
                        r.reference.at(x, y, c) = 0.5f;
                        r.stack.aux.alpha.at(x, y, c) = float(alpha);
                    }
                    CounterRng rng = pixel_rng(spec.seed, x, y);
                    for (int k = 0; k < M; ++k) {
                        float* e = r.stack.estimate(x, y, k);
                        for (int c = 0; c < C; ++c)
                            e[c] = float(alpha * 2.0 * rng.next_double());
                    }
                }
            break;
        }
        case SceneSpec::Kind::SineAdd: {
            r.stack.aux.beta = ImageF(W, H, C);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const double base = 0.5 * (1.0 + std::sin(spec.frequency * double(x + y)));
                    for (int c = 0; c < C; ++c) {
                        r.reference.at(x, y, c) = float(base);
                        r.stack.aux.beta.at(x, y, c) = float(base);
                    }
                    CounterRng rng = pixel_rng(spec.seed, x, y);
                    for (int k = 0; k < M; ++k) {
                        float* e = r.stack.estimate(x, y, k);
                        for (int c = 0; c < C; ++c)
                            e[c] = float(base + noise_draw(spec, rng));
                    }
                }
            break;
        }
        case SceneSpec::Kind::HeavisideBank:
        case SceneSpec::Kind::LinearIntegrand: {
            if (C != 1)
                throw ConfigError("scene spec: sample-space scenes are single-channel");
            r.has_bank = true;
            r.bank = spec.kind == SceneSpec::Kind::LinearIntegrand
                         ? make_linear_bank()
                         : make_heaviside_bank(spec.bank_count, spec.seed);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    CounterRng rng = pixel_rng(spec.seed, x, y);
                    for (int k = 0; k < M; ++k)
                        *r.stack.estimate(x, y, k) = float(rng.next_double());
                    r.reference.at(x, y) = float(r.bank.reference(0));
                }
            break;
        }
    }
    return r;
}

} // namespace pet
