#include "pet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pet/errors.hpp"

namespace pet {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / double(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void dft_direct(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    for (size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * double(k * m % n) / double(n);
            acc += a[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    a = std::move(out);
}

// 2D forward transform of a mean-subtracted scalar image; result centered
// (DC moved to (W/2, H/2)).
std::vector<std::complex<double>> transform_centered(const ImageF& scalar) {
    const int W = scalar.width, H = scalar.height;
    const size_t n = size_t(W) * H;
    double mean = 0.0;
    for (float v : scalar.data) mean += v;
    mean /= double(n);

    std::vector<std::complex<double>> grid(n);
    for (size_t i = 0; i < n; ++i) grid[i] = std::complex<double>(double(scalar.data[i]) - mean, 0.0);

    std::vector<std::complex<double>> line;
    line.reserve(size_t(std::max(W, H)));
    for (int y = 0; y < H; ++y) {
        line.assign(grid.begin() + size_t(y) * W, grid.begin() + size_t(y + 1) * W);
        dft_1d(line);
        std::copy(line.begin(), line.end(), grid.begin() + size_t(y) * W);
    }
    for (int x = 0; x < W; ++x) {
        line.resize(size_t(H));
        for (int y = 0; y < H; ++y) line[size_t(y)] = grid[size_t(y) * W + x];
        dft_1d(line);
        for (int y = 0; y < H; ++y) grid[size_t(y) * W + x] = line[size_t(y)];
    }

    std::vector<std::complex<double>> centered(n);
    for (int y = 0; y < H; ++y) {
        const int cy = (y + H / 2) % H;
        for (int x = 0; x < W; ++x) {
            const int cx = (x + W / 2) % W;
            centered[size_t(cy) * W + cx] = grid[size_t(y) * W + x];
        }
    }
    return centered;
}

} // namespace

void dft_1d(std::vector<std::complex<double>>& data) {
    if (data.empty()) return;
    if (is_pow2(int(data.size())))
        fft_radix2(data);
    else
        dft_direct(data);
}

Spectrum power_spectrum(const ImageF& img) {
    if (img.empty()) throw ConfigError("power_spectrum: empty image");
    const ImageF lum = luminance(img);
    const auto grid = transform_centered(lum);
    Spectrum s;
    s.width = lum.width;
    s.height = lum.height;
    s.power.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) s.power[i] = std::norm(grid[i]);
    return s;
}

std::vector<RadialBin> radial_average(const Spectrum& s, int bins) {
    if (bins <= 0) throw ConfigError("radial_average: bins must be positive");
    double fmax = 0.0;
    for (int ky = 0; ky < s.height; ++ky)
        for (int kx = 0; kx < s.width; ++kx)
            fmax = std::max(fmax, std::hypot(s.fx(kx), s.fy(ky)));
    std::vector<RadialBin> out(size_t(bins), RadialBin{});
    for (int i = 0; i < bins; ++i) out[size_t(i)].radius = (i + 0.5) / double(bins) * fmax;
    for (int ky = 0; ky < s.height; ++ky) {
        for (int kx = 0; kx < s.width; ++kx) {
            if (kx == s.width / 2 && ky == s.height / 2) continue;  // DC
            const double r = std::hypot(s.fx(kx), s.fy(ky));
            int b = int(r / fmax * bins);
            b = std::min(b, bins - 1);
            out[size_t(b)].mean_power += s.at(kx, ky);
            out[size_t(b)].count += 1;
        }
    }
    for (RadialBin& b : out)
        if (b.count > 0) b.mean_power /= double(b.count);
    return out;
}

double band_power(const Spectrum& s, double f_lo, double f_hi) {
    double acc = 0.0;
    for (int ky = 0; ky < s.height; ++ky) {
        for (int kx = 0; kx < s.width; ++kx) {
            if (kx == s.width / 2 && ky == s.height / 2) continue;
            const double r = std::hypot(s.fx(kx), s.fy(ky));
            if (r > f_lo && r <= f_hi) acc += s.at(kx, ky);
        }
    }
    return acc;
}

double low_freq_ratio(const ImageF& err, double cutoff) {
    if (cutoff <= 0.0 || cutoff > 0.5)
        throw ConfigError("low_freq_ratio: cutoff must lie in (0, 0.5]");
    const Spectrum s = power_spectrum(err);
    const double low = band_power(s, 0.0, cutoff);
    const double total = band_power(s, 0.0, 2.0);
    return total > 0.0 ? low / total : 0.0;
}

ImageF tiled_spectrum(const ImageF& err, int tile) {
    if (tile <= 0) throw ConfigError("tiled_spectrum: tile must be positive");
    const ImageF lum = luminance(err);
    ImageF out(lum.width, lum.height, 1, 0.0f);
    for (int ty = 0; ty < lum.height; ty += tile) {
        for (int tx = 0; tx < lum.width; tx += tile) {
            const int tw = std::min(tile, lum.width - tx);
            const int th = std::min(tile, lum.height - ty);
            ImageF sub(tw, th, 1);
            for (int y = 0; y < th; ++y)
                for (int x = 0; x < tw; ++x) sub.at(x, y) = lum.at(tx + x, ty + y);
            const auto grid = transform_centered(sub);  // DC bin is zero (mean removed)
            double vmax = 0.0;
            std::vector<double> vals(grid.size());
            for (size_t i = 0; i < grid.size(); ++i) {
                vals[i] = std::log1p(std::abs(grid[i]));
                vmax = std::max(vmax, vals[i]);
            }
            const double c = vmax > 0.0 ? 1.0 / vmax : 0.0;
            for (int y = 0; y < th; ++y)
                for (int x = 0; x < tw; ++x)
                    out.at(tx + x, ty + y) = float(c * vals[size_t(y) * tw + x]);
        }
    }
    return out;
}

std::vector<CompareRow> compare_report(const std::vector<std::string>& names,
                                       const std::vector<const ImageF*>& images,
                                       const ImageF& reference, const PerceptualModel& m) {
    if (names.size() != images.size())
        throw ConfigError("compare_report: names/images size mismatch");
    std::vector<CompareRow> rows;
    rows.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        const ImageF& img = *images[i];
        CompareRow row;
        row.name = names[i];
        row.mse = mse(img, reference);
        row.energy = perceptual_energy(img, reference, m);
        row.pmse = row.energy / (double(img.pixel_count()) * double(img.channels));
        row.low_freq = low_freq_ratio(difference(img, reference), 0.125);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CompareRow& a, const CompareRow& b) { return a.pmse < b.pmse; });
    return rows;
}

std::string format_compare_table(const std::vector<CompareRow>& rows) {
    size_t name_w = 4;
    for (const CompareRow& r : rows) name_w = std::max(name_w, r.name.size());
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %12s  %12s  %12s  %12s\n", int(name_w), "name",
                  "mse", "pmse", "low_freq", "energy");
    out += buf;
    for (const CompareRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %12.6g  %12.6g  %12.6g  %12.6g\n", int(name_w),
                      r.name.c_str(), r.mse, r.pmse, r.low_freq, r.energy);
        out += buf;
    }
    return out;
}

} // namespace pet
