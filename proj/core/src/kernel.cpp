#include "pet/kernel.hpp"

#include <cmath>
#include <numbers>

#include "pet/errors.hpp"

namespace pet {

namespace {

void normalize_sum1(std::vector<float>& w) {
    double s = 0.0;
    for (float v : w) s += v;
    if (s == 0.0) throw ConfigError("kernel: cannot normalize zero-sum weights");
    for (float& v : w) v = float(v / s);
}

std::vector<float> sampled_gaussian(double sx, double sy, int radius) {
    const int d = 2 * radius + 1;
    std::vector<float> w(size_t(d) * d);
    for (int vy = -radius; vy <= radius; ++vy)
        for (int vx = -radius; vx <= radius; ++vx) {
            const double e = 0.5 * (vx * vx / (sx * sx) + vy * vy / (sy * sy));
            w[size_t(vy + radius) * d + (vx + radius)] = float(std::exp(-e));
        }
    normalize_sum1(w);
    return w;
}

int default_radius(double sigma) { return std::max(1, int(std::ceil(3.0 * sigma))); }

} // namespace

double Kernel::l1() const {
    if (varying) throw ConfigError("kernel: l1() undefined for varying kernels");
    double s = 0.0;
    for (float v : weights) s += std::abs(double(v));
    return s;
}

double Kernel::sum() const {
    if (varying) throw ConfigError("kernel: sum() undefined for varying kernels");
    double s = 0.0;
    for (float v : weights) s += double(v);
    return s;
}

Kernel Kernel::delta() {
    Kernel k;
    k.radius = 0;
    k.weights = {1.0f};
    return k;
}

Kernel Kernel::binomial3() {
    Kernel k;
    k.radius = 1;
    k.weights = {1 / 16.0f, 2 / 16.0f, 1 / 16.0f,
                 2 / 16.0f, 4 / 16.0f, 2 / 16.0f,
                 1 / 16.0f, 2 / 16.0f, 1 / 16.0f};
    return k;
}

Kernel Kernel::gaussian(double sigma, int radius) {
    if (sigma <= 0.0) throw ConfigError("kernel: gaussian sigma must be positive");
    Kernel k;
    k.radius = radius < 0 ? default_radius(sigma) : radius;
    k.weights = sampled_gaussian(sigma, sigma, k.radius);
    return k;
}

Kernel Kernel::gaussian_aniso(double sigma_x, double sigma_y, int radius) {
    if (sigma_x <= 0.0 || sigma_y <= 0.0)
        throw ConfigError("kernel: gaussian sigma must be positive");
    Kernel k;
    k.radius = radius < 0 ? default_radius(std::max(sigma_x, sigma_y)) : radius;
    k.weights = sampled_gaussian(sigma_x, sigma_y, k.radius);
    return k;
}

Kernel Kernel::highpass(double sigma, int radius) {
    Kernel g = gaussian(sigma, radius);
    for (float& v : g.weights) v = -v;
    g.weights[size_t(g.radius) * g.diameter() + g.radius] += 1.0f;
    return g;
}

Kernel Kernel::varying_field(int w, int h, int radius,
                             const std::function<void(int, int, float*)>& fn) {
    if (w <= 0 || h <= 0 || radius < 0)
        throw ConfigError("kernel: bad varying-field dimensions");
    Kernel k;
    k.radius = radius;
    k.varying = true;
    k.field_width = w;
    k.field_height = h;
    k.weights.resize(size_t(w) * h * k.table_size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            fn(x, y, &k.weights[(size_t(y) * w + x) * k.table_size()]);
    return k;
}

Kernel Kernel::blend_horizontal(const Kernel& a, const Kernel& b, int w, int h) {
    if (a.varying || b.varying || a.radius != b.radius)
        throw ConfigError("kernel: blend needs two uniform kernels of equal radius");
    const int n = a.table_size();
    return varying_field(w, h, a.radius, [&](int x, int /*y*/, float* out) {
        const float t = w > 1 ? float(x) / float(w - 1) : 0.0f;
        for (int i = 0; i < n; ++i)
            out[i] = (1.0f - t) * a.weights[i] + t * b.weights[i];
    });
}

// One pixel subtends tau = (180/pi)*2*atan(1/(2*dpi*D)) degrees at distance D
// (inches); the visual filter stddev in pixels is 0.00954/tau.
double sigma_from_viewing(double dpi, double distance_inches) {
    if (dpi <= 0.0 || distance_inches <= 0.0)
        throw ConfigError("viewing: dpi and distance must be positive");
    const double tau =
        (180.0 / std::numbers::pi) * 2.0 * std::atan(1.0 / (2.0 * dpi * distance_inches));
    return 0.00954 / tau;
}

double distance_from_sigma(double dpi, double sigma) {
    if (dpi <= 0.0 || sigma <= 0.0)
        throw ConfigError("viewing: dpi and sigma must be positive");
    const double half_tau_rad = (std::numbers::pi / 180.0) * 0.00954 / (2.0 * sigma);
    return 1.0 / (2.0 * dpi * std::tan(half_tau_rad));
}

} // namespace pet
