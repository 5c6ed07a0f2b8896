#include "pet/incremental.hpp"

#include <algorithm>
#include <cmath>

#include "pet/convolve.hpp"
#include "pet/errors.hpp"

namespace pet {

AutoCorr precompute_autocorr(const Kernel& g) {
    AutoCorr a;
    a.radius = g.radius;
    a.varying = g.varying;
    const int K = g.radius;
    const int S = a.span();
    if (!g.varying) {
        // C_gg(x) = sum_v g(v-x) g(v); supports overlap only for |x|_inf <= 2K
        a.table.assign(size_t(S) * S, 0.0);
        for (int xy = -2 * K; xy <= 2 * K; ++xy) {
            for (int xx = -2 * K; xx <= 2 * K; ++xx) {
                double acc = 0.0;
                for (int vy = -K; vy <= K; ++vy) {
                    for (int vx = -K; vx <= K; ++vx) {
                        const int uy = vy - xy, ux = vx - xx;
                        if (ux < -K || ux > K || uy < -K || uy > K) continue;
                        acc += double(g.w(g.weights.data(), ux, uy)) *
                               double(g.w(g.weights.data(), vx, vy));
                    }
                }
                a.table[size_t(xy + 2 * K) * S + (xx + 2 * K)] = acc;
            }
        }
    } else {
        // per-pixel tables; all sums run over output pixels i inside the field
        const int W = g.field_width, H = g.field_height;
        a.width = W;
        a.height = H;
        a.diag.assign(size_t(W) * H, 0.0);
        a.pair.assign(size_t(W) * H * S * S, 0.0);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                // pair(x, x+d) = sum_u w_{x+u}(u) * w_{x+u}(u-d)
                double* prow = &a.pair[(size_t(y) * W + x) * S * S];
                for (int dy = -2 * K; dy <= 2 * K; ++dy) {
                    for (int dx = -2 * K; dx <= 2 * K; ++dx) {
                        double acc = 0.0;
                        for (int uy = -K; uy <= K; ++uy) {
                            const int iy = y + uy;
                            if (iy < 0 || iy >= H) continue;
                            const int wy = uy - dy;
                            if (wy < -K || wy > K) continue;
                            for (int ux = -K; ux <= K; ++ux) {
                                const int ix = x + ux;
                                if (ix < 0 || ix >= W) continue;
                                const int wx = ux - dx;
                                if (wx < -K || wx > K) continue;
                                const float* ti = g.table_at(ix, iy);
                                acc += double(g.w(ti, ux, uy)) * double(g.w(ti, wx, wy));
                            }
                        }
                        prow[size_t(dy + 2 * K) * S + (dx + 2 * K)] = acc;
                    }
                }
                a.diag[size_t(y) * W + x] = prow[size_t(2 * K) * S + 2 * K];
            }
        }
    }
    return a;
}

IncrementalState IncrementalState::init(const Kernel& g, const ImageF& est,
                                        const ImageF& target,
                                        std::array<double, 3> lambda, int n_max) {
    if (!all_finite(est) || !all_finite(target))
        throw NumericError("incremental: non-finite input");
    IncrementalState s;
    s.width_ = est.width;
    s.height_ = est.height;
    s.channels_ = est.channels;
    s.lambda_ = lambda;
    s.n_max_ = size_t(std::max(1, n_max));
    s.auto_ = precompute_autocorr(g);
    const int K = g.radius, C = est.channels;

    // g*est - target on the energy support, accumulated in double end to end
    // so the maintained energy and xcorr are exact for the given float data.
    std::vector<double> resid;
    int sw = 0, sh = 0;
    if (!g.varying) {
        if ((target.width - est.width) % 2 != 0 || target.width < est.width ||
            target.height - est.height != target.width - est.width ||
            target.channels != C)
            throw ConfigError("incremental: target must be a symmetric padded support");
        s.pad_ = (target.width - est.width) / 2;
        if (s.pad_ < K) throw ConfigError("incremental: target padding smaller than kernel radius");
        const int P = s.pad_;
        sw = est.width + 2 * P;
        sh = est.height + 2 * P;
        resid.assign(size_t(sw) * sh * C, 0.0);
        for (int oy = 0; oy < sh; ++oy)
            for (int ox = 0; ox < sw; ++ox)
                for (int c = 0; c < C; ++c) {
                    double acc = 0.0;
                    for (int vy = -K; vy <= K; ++vy)
                        for (int vx = -K; vx <= K; ++vx) {
                            const int sx = ox - P - vx, sy = oy - P - vy;
                            if (sx < 0 || sx >= est.width || sy < 0 || sy >= est.height)
                                continue;
                            acc += double(g.w(g.weights.data(), vx, vy)) *
                                   double(est.at(sx, sy, c));
                        }
                    resid[(size_t(oy) * sw + ox) * C + c] = acc - double(target.at(ox, oy, c));
                }
    } else {
        if (g.field_width != est.width || g.field_height != est.height)
            throw ConfigError("incremental: varying kernel field mismatch");
        if (!target.same_shape(est))
            throw ConfigError("incremental: varying-kernel target must match image support");
        s.pad_ = 0;
        sw = est.width;
        sh = est.height;
        resid.assign(size_t(sw) * sh * C, 0.0);
        for (int y = 0; y < sh; ++y)
            for (int x = 0; x < sw; ++x) {
                const float* t = g.table_at(x, y);
                for (int c = 0; c < C; ++c) {
                    double acc = 0.0;
                    for (int vy = -K; vy <= K; ++vy)
                        for (int vx = -K; vx <= K; ++vx) {
                            const int sx = x - vx, sy = y - vy;
                            if (sx < 0 || sx >= est.width || sy < 0 || sy >= est.height)
                                continue;
                            acc += double(g.w(t, vx, vy)) * double(est.at(sx, sy, c));
                        }
                    resid[(size_t(y) * sw + x) * C + c] = acc - double(target.at(x, y, c));
                }
            }
    }

    double e = 0.0;
    for (size_t i = 0; i < resid.size(); ++i) {
        const double d = resid[i];
        e += lambda[i % size_t(C)] * d * d;
    }
    s.energy_ = e;

    // C_c(x) = sum_i resid_c(i) * g_{i,x}, for x inside the image
    const int W = est.width, H = est.height, P = s.pad_;
    s.xcorr_.assign(size_t(W) * H * C, 0.0);
    if (!g.varying) {
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                for (int c = 0; c < C; ++c) {
                    double acc = 0.0;
                    for (int vy = -K; vy <= K; ++vy)
                        for (int vx = -K; vx <= K; ++vx)
                            acc += double(g.w(g.weights.data(), vx, vy)) *
                                   resid[(size_t(y + vy + P) * sw + (x + vx + P)) * C + c];
                    s.xcorr_[(size_t(y) * W + x) * C + c] = acc;
                }
    } else {
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                for (int c = 0; c < C; ++c) {
                    double acc = 0.0;
                    for (int uy = -K; uy <= K; ++uy) {
                        const int iy = y + uy;
                        if (iy < 0 || iy >= H) continue;
                        for (int ux = -K; ux <= K; ++ux) {
                            const int ix = x + ux;
                            if (ix < 0 || ix >= W) continue;
                            acc += double(g.w(g.table_at(ix, iy), ux, uy)) *
                                   resid[(size_t(iy) * sw + ix) * C + c];
                        }
                    }
                    s.xcorr_[(size_t(y) * W + x) * C + c] = acc;
                }
    }
    return s;
}

IncrementalState IncrementalState::init_from_model(const ImageF& est, const ImageF& ref,
                                                   const PerceptualModel& m, int n_max) {
    if (m.boundary == Boundary::Reflect)
        throw ConfigError("incremental: reflect boundaries are not supported; use leaky-zero-pad");
    const ImageF te = tonemap_image(m.tonemap, est);
    const ImageF tr = tonemap_image(m.tonemap, ref);
    ImageF target;
    if (!m.g.varying) {
        const int pad = std::max(m.g.radius, m.h.radius);
        target = convolve_full(tr, m.h, pad);
    } else {
        if (m.h.varying) throw ConfigError("incremental: varying reference kernels unsupported");
        target = convolve(tr, m.h, Boundary::LeakyZeroPad);
    }
    return init(m.g, te, target, m.lambda, n_max);
}

double IncrementalState::folded_xcorr(int x, int y, int c) const {
    double v = xcorr_[(size_t(y) * width_ + x) * channels_ + c];
    const int reach = 2 * auto_.radius;
    for (const PixelDelta& l : log_) {
        if (std::abs(l.x - x) > reach || std::abs(l.y - y) > reach) continue;
        const double cc = auto_.varying ? auto_.at_pair(l.x, l.y, x, y)
                                        : auto_.at_offset(x - l.x, y - l.y);
        v += l.d[size_t(c)] * cc;
    }
    return v;
}

double IncrementalState::trial_update(std::span<const PixelDelta> updates) const {
    double delta = 0.0;
    for (size_t j = 0; j < updates.size(); ++j) {
        const PixelDelta& uj = updates[j];
        for (int c = 0; c < channels_; ++c)
            delta += 2.0 * lambda_[size_t(c)] * uj.d[size_t(c)] * folded_xcorr(uj.x, uj.y, c);
        for (size_t k = 0; k < updates.size(); ++k) {
            const PixelDelta& uk = updates[k];
            const double cc = auto_.varying
                                  ? auto_.at_pair(uj.x, uj.y, uk.x, uk.y)
                                  : auto_.at_offset(uk.x - uj.x, uk.y - uj.y);
            if (cc == 0.0) continue;
            for (int c = 0; c < channels_; ++c)
                delta += lambda_[size_t(c)] * uj.d[size_t(c)] * uk.d[size_t(c)] * cc;
        }
    }
    return delta;
}

void IncrementalState::accept(std::span<const PixelDelta> updates) {
    energy_ += trial_update(updates);
    log_.insert(log_.end(), updates.begin(), updates.end());
    if (log_.size() > n_max_) rebuild();
}

void IncrementalState::rebuild() {
    const int reach = 2 * auto_.radius;
    for (const PixelDelta& l : log_) {
        for (int dy = -reach; dy <= reach; ++dy) {
            const int y = l.y + dy;
            if (y < 0 || y >= height_) continue;
            for (int dx = -reach; dx <= reach; ++dx) {
                const int x = l.x + dx;
                if (x < 0 || x >= width_) continue;
                const double cc = auto_.varying ? auto_.at_pair(l.x, l.y, x, y)
                                                : auto_.at_offset(dx, dy);
                if (cc == 0.0) continue;
                double* cell = &xcorr_[(size_t(y) * width_ + x) * channels_];
                for (int c = 0; c < channels_; ++c) cell[c] += l.d[size_t(c)] * cc;
            }
        }
    }
    log_.clear();
}

} // namespace pet
