#include "pet/horizontal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pet/errors.hpp"
#include "pet/rng.hpp"

namespace pet {

Permutation Permutation::identity(int w, int h) {
    Permutation p;
    p.width = w;
    p.height = h;
    p.source.resize(size_t(w) * h);
    std::iota(p.source.begin(), p.source.end(), 0u);
    return p;
}

bool Permutation::is_bijection() const {
    std::vector<uint8_t> seen(source.size(), 0);
    for (uint32_t s : source) {
        if (s >= source.size() || seen[s]) return false;
        seen[s] = 1;
    }
    return true;
}

ImageF apply_permutation(const ImageF& img, const Permutation& pi) {
    if (pi.width != img.width || pi.height != img.height)
        throw ConfigError("apply_permutation: shape mismatch");
    ImageF out(img.width, img.height, img.channels);
    const int C = img.channels;
    for (size_t i = 0; i < pi.source.size(); ++i) {
        const float* src = &img.data[size_t(pi.source[i]) * C];
        float* dst = &out.data[i * C];
        for (int c = 0; c < C; ++c) dst[c] = src[c];
    }
    return out;
}

Dissimilarity Dissimilarity::cost_map(int extent, std::vector<double> cost, double weight) {
    if (extent < 0) throw ConfigError("dissimilarity: negative extent");
    const size_t n = size_t(2 * extent + 1) * (2 * extent + 1);
    if (cost.size() != n) throw ConfigError("dissimilarity: cost table size mismatch");
    if (weight < 0.0) throw ConfigError("dissimilarity: negative weight");
    Dissimilarity d;
    d.kind = Kind::CostMap;
    d.extent = extent;
    d.cost = std::move(cost);
    d.weight = weight;
    return d;
}

bool Dissimilarity::allowed(int dx, int dy) const {
    if (kind == Kind::Disk) return double(dx) * dx + double(dy) * dy <= radius * radius;
    return std::abs(dx) <= extent && std::abs(dy) <= extent;
}

double Dissimilarity::at(int dx, int dy) const {
    if (kind == Kind::Disk) return 0.0;
    return weight * cost[size_t(dy + extent) * (2 * extent + 1) + (dx + extent)];
}

namespace {

// Visits every pixel exactly once per sweep. The relocation search has no
// seed parameter, so Random shuffles are derived from the sweep index alone.
template <typename Fn>
void sweep_pixels(int W, int H, Traversal order, int sweep, Fn&& fn) {
    if (order == Traversal::Random) {
        std::vector<int> idx(size_t(W) * H);
        std::iota(idx.begin(), idx.end(), 0);
        CounterRng rng(0x686f72, 0x6f72 + uint64_t(sweep) * 0x9e3779b9u);
        for (size_t i = idx.size() - 1; i > 0; --i)
            std::swap(idx[i], idx[size_t(rng.next_below(uint64_t(i) + 1))]);
        for (int i : idx) fn(i % W, i / W);
        return;
    }
    for (int y = 0; y < H; ++y) {
        const bool reverse = order == Traversal::Serpentine && (y & 1);
        if (!reverse)
            for (int x = 0; x < W; ++x) fn(x, y);
        else
            for (int x = W - 1; x >= 0; --x) fn(x, y);
    }
}

} // namespace

HorizontalResult horizontal_minimize(const ImageF& est, const ImageF& surrogate,
                                     const PerceptualModel& m, const Dissimilarity& d,
                                     int search_radius, int sweeps, Traversal order,
                                     const AuxPlanes* aux) {
    if (!est.same_shape(surrogate))
        throw ConfigError("horizontal_minimize: surrogate shape mismatch");
    if (search_radius < 1) throw ConfigError("horizontal_minimize: search radius must be >= 1");
    if (sweeps < 0) throw ConfigError("horizontal_minimize: negative sweep count");
    const int W = est.width, H = est.height, C = est.channels;
    const bool has_aux = aux != nullptr && !aux->empty();
    const ImageF demod = has_aux ? demodulate(est, *aux) : est;

    // displayed value when source pixel s sits at position i
    auto render = [&](int i, int s, float* out) {
        const float* dv = &demod.data[size_t(s) * C];
        if (!has_aux) {
            for (int c = 0; c < C; ++c) out[c] = dv[c];
            return;
        }
        for (int c = 0; c < C; ++c) {
            float v = dv[c];
            if (!aux->alpha.empty()) v *= std::max(aux->alpha.data[size_t(i) * C + c], kAlphaFloor);
            if (!aux->beta.empty()) v += aux->beta.data[size_t(i) * C + c];
            out[c] = v;
        }
    };

    HorizontalResult r;
    r.perm = Permutation::identity(W, H);
    ImageF cur_raw(W, H, C);
    for (int i = 0; i < W * H; ++i) render(i, i, &cur_raw.data[size_t(i) * C]);
    ImageF cur_tm = tonemap_image(m.tonemap, cur_raw);

    IncrementalState state = IncrementalState::init_from_model(cur_raw, surrogate, m);
    double dis_total = 0.0;
    if (d.kind == Dissimilarity::Kind::CostMap)
        dis_total = double(W) * H * d.at(0, 0);
    r.trace.push_back(state.energy() + dis_total);

    for (int s = 0; s < sweeps; ++s) {
        int accepted = 0;
        sweep_pixels(W, H, order, s, [&](int xi, int yi) {
            const int i = yi * W + xi;
            const int si = int(r.perm.source[size_t(i)]);
            const int six = si % W, siy = si / W;
            double best_delta = 0.0;
            int best_j = -1;
            PixelDelta ui, uj;
            for (int wy = -search_radius; wy <= search_radius; ++wy) {
                const int yj = yi + wy;
                if (yj < 0 || yj >= H) continue;
                for (int wx = -search_radius; wx <= search_radius; ++wx) {
                    const int xj = xi + wx;
                    if (xj < 0 || xj >= W || (wx == 0 && wy == 0)) continue;
                    const int j = yj * W + xj;
                    const int sj = int(r.perm.source[size_t(j)]);
                    const int sjx = sj % W, sjy = sj / W;
                    // both relocated sets must stay admissible
                    if (!d.allowed(xi - sjx, yi - sjy) || !d.allowed(xj - six, yj - siy))
                        continue;
                    float vi[3], vj[3];
                    render(i, sj, vi);
                    render(j, si, vj);
                    ui.x = xi;
                    ui.y = yi;
                    uj.x = xj;
                    uj.y = yj;
                    for (int c = 0; c < C; ++c) {
                        ui.d[size_t(c)] = double(tonemap_value(m.tonemap, vi[c])) -
                                          double(cur_tm.at(xi, yi, c));
                        uj.d[size_t(c)] = double(tonemap_value(m.tonemap, vj[c])) -
                                          double(cur_tm.at(xj, yj, c));
                    }
                    double delta = state.trial_swap(ui, uj);
                    if (d.kind == Dissimilarity::Kind::CostMap)
                        delta += d.at(xi - sjx, yi - sjy) + d.at(xj - six, yj - siy) -
                                 d.at(xi - six, yi - siy) - d.at(xj - sjx, yj - sjy);
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_j = j;
                    }
                }
            }
            if (best_j >= 0) {
                const int j = best_j;
                const int xj = j % W, yj = j / W;
                const int sj = int(r.perm.source[size_t(j)]);
                const int sjx = sj % W, sjy = sj / W;
                float vi[3], vj[3];
                render(i, sj, vi);
                render(j, si, vj);
                ui.x = xi;
                ui.y = yi;
                uj.x = xj;
                uj.y = yj;
                for (int c = 0; c < C; ++c) {
                    ui.d[size_t(c)] = double(tonemap_value(m.tonemap, vi[c])) -
                                      double(cur_tm.at(xi, yi, c));
                    uj.d[size_t(c)] = double(tonemap_value(m.tonemap, vj[c])) -
                                      double(cur_tm.at(xj, yj, c));
                }
                const PixelDelta both[2] = {ui, uj};
                state.accept({both, 2});
                if (d.kind == Dissimilarity::Kind::CostMap)
                    dis_total += d.at(xi - sjx, yi - sjy) + d.at(xj - six, yj - siy) -
                                 d.at(xi - six, yi - siy) - d.at(xj - sjx, yj - sjy);
                std::swap(r.perm.source[size_t(i)], r.perm.source[size_t(j)]);
                for (int c = 0; c < C; ++c) {
                    cur_raw.at(xi, yi, c) = vi[c];
                    cur_tm.at(xi, yi, c) = tonemap_value(m.tonemap, vi[c]);
                    cur_raw.at(xj, yj, c) = vj[c];
                    cur_tm.at(xj, yj, c) = tonemap_value(m.tonemap, vj[c]);
                }
                ++accepted;
            }
        });
        r.sweeps = s + 1;
        r.trace.push_back(state.energy() + dis_total);
        if (accepted == 0) break;
    }
    r.image = cur_raw;
    return r;
}

HorizontalResult permutation_baseline(const ImageF& est, const DitherMask& mask, int tile) {
    if (tile <= 0) throw ConfigError("permutation_baseline: tile must be positive");
    if (mask.width <= 0 || mask.height <= 0)
        throw ConfigError("permutation_baseline: empty mask");
    const int W = est.width, H = est.height, C = est.channels;
    HorizontalResult r;
    r.perm = Permutation::identity(W, H);

    std::vector<int> cells, by_lum, by_mask;
    for (int ty = 0; ty < H; ty += tile) {
        for (int tx = 0; tx < W; tx += tile) {
            cells.clear();
            for (int y = ty; y < std::min(ty + tile, H); ++y)
                for (int x = tx; x < std::min(tx + tile, W); ++x)
                    cells.push_back(y * W + x);
            by_lum = cells;
            std::stable_sort(by_lum.begin(), by_lum.end(), [&](int a, int b) {
                return luminance_of(&est.data[size_t(a) * C], C) <
                       luminance_of(&est.data[size_t(b) * C], C);
            });
            by_mask = cells;
            std::stable_sort(by_mask.begin(), by_mask.end(), [&](int a, int b) {
                // mask tiles toroidally when its size differs from the image
                return mask.threshold_at(a % W, a / W) < mask.threshold_at(b % W, b / W);
            });
            // the s-th darkest pixel moves to the s-th smallest threshold
            for (size_t s = 0; s < cells.size(); ++s)
                r.perm.source[size_t(by_mask[s])] = uint32_t(by_lum[s]);
        }
    }
    r.image = apply_permutation(est, r.perm);
    r.sweeps = 1;
    return r;
}

HorizontalResult shaped_noise(const ImageF& img, const Kernel& k, int sweeps, uint64_t seed) {
    if (img.empty()) throw ConfigError("shaped_noise: empty image");
    if (sweeps < 0) throw ConfigError("shaped_noise: negative sweep count");
    const int W = img.width, H = img.height, C = img.channels;
    const size_t N = img.pixel_count();

    // the image is its own error: target is zero on the energy support
    ImageF target;
    if (!k.varying)
        target = ImageF(W + 2 * k.radius, H + 2 * k.radius, C, 0.0f);
    else
        target = ImageF(W, H, C, 0.0f);
    IncrementalState state = IncrementalState::init(k, img, target);

    HorizontalResult r;
    r.perm = Permutation::identity(W, H);
    ImageF cur = img;
    r.trace.push_back(state.energy());

    CounterRng rng(seed, 0x50a9);
    PixelDelta ua, ub;
    for (int s = 0; s < sweeps; ++s) {
        for (size_t t = 0; t < N; ++t) {
            const size_t a = size_t(rng.next_below(N));
            const size_t b = size_t(rng.next_below(N));
            if (a == b) continue;
            ua.x = int(a % size_t(W));
            ua.y = int(a / size_t(W));
            ub.x = int(b % size_t(W));
            ub.y = int(b / size_t(W));
            bool differ = false;
            for (int c = 0; c < C; ++c) {
                const double va = cur.data[a * C + c], vb = cur.data[b * C + c];
                ua.d[size_t(c)] = vb - va;
                ub.d[size_t(c)] = va - vb;
                differ |= va != vb;
            }
            if (!differ) continue;
            if (state.trial_swap(ua, ub) < 0.0) {
                const PixelDelta both[2] = {ua, ub};
                state.accept({both, 2});
                for (int c = 0; c < C; ++c)
                    std::swap(cur.data[a * C + c], cur.data[b * C + c]);
                std::swap(r.perm.source[a], r.perm.source[b]);
            }
        }
        r.sweeps = s + 1;
        r.trace.push_back(state.energy());
    }
    r.image = cur;
    return r;
}

AprioriResult apriori_optimize(const IntegrandBank& bank, const EstimateStack& samples,
                               const std::vector<std::vector<double>>& weights,
                               const PerceptualModel& m, int sweeps, uint64_t seed) {
    if (samples.channels != 1)
        throw ConfigError("apriori_optimize: sample stacks are single-channel");
    if (samples.ragged()) throw ConfigError("apriori_optimize: sample stack must be uniform");
    const int W = samples.width, H = samples.height, M = samples.m;
    const int T = bank.count();
    if (int(weights.size()) != T)
        throw ConfigError("apriori_optimize: weights must have one row per integrand");
    for (const auto& row : weights)
        if (int(row.size()) != M)
            throw ConfigError("apriori_optimize: weights row length must equal sample count");
    const size_t N = size_t(W) * H;

    // prefix-mean estimate planes for every (integrand, prefix) with weight > 0
    struct Plane {
        double w;
        ImageF est;  // current (permuted) prefix means
        IncrementalState state;
    };
    std::vector<Plane> planes;
    for (int t = 0; t < T; ++t) {
        for (int kp = 0; kp < M; ++kp) {
            if (weights[size_t(t)][size_t(kp)] == 0.0) continue;
            ImageF est(W, H, 1);
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    double acc = 0.0;
                    for (int q = 0; q <= kp; ++q)
                        acc += bank.evaluate(t, double(*samples.estimate(x, y, q)));
                    est.at(x, y) = float(acc / double(kp + 1));
                }
            const ImageF ref = constant_image(W, H, 1, float(bank.reference(t)));
            IncrementalState st = IncrementalState::init_from_model(est, ref, m);
            planes.push_back(Plane{weights[size_t(t)][size_t(kp)],
                                   tonemap_image(m.tonemap, est), std::move(st)});
        }
    }

    AprioriResult r;
    r.perm = Permutation::identity(W, H);
    auto total_energy = [&]() {
        double acc = 0.0;
        for (const Plane& p : planes) acc += p.w * p.state.energy();
        return acc;
    };
    r.trace.push_back(total_energy());

    CounterRng rng(seed, 0xa9a9);
    PixelDelta ua, ub;
    for (int s = 0; s < sweeps; ++s) {
        for (size_t t = 0; t < N; ++t) {
            const size_t a = size_t(rng.next_below(N));
            const size_t b = size_t(rng.next_below(N));
            if (a == b) continue;
            ua.x = int(a % size_t(W));
            ua.y = int(a / size_t(W));
            ub.x = int(b % size_t(W));
            ub.y = int(b / size_t(W));
            double delta = 0.0;
            for (Plane& p : planes) {
                const double va = p.est.data[a], vb = p.est.data[b];
                ua.d[0] = vb - va;
                ub.d[0] = va - vb;
                delta += p.w * p.state.trial_swap(ua, ub);
            }
            if (delta < 0.0) {
                for (Plane& p : planes) {
                    const double va = p.est.data[a], vb = p.est.data[b];
                    ua.d[0] = vb - va;
                    ub.d[0] = va - vb;
                    const PixelDelta both[2] = {ua, ub};
                    p.state.accept({both, 2});
                    std::swap(p.est.data[a], p.est.data[b]);
                }
                std::swap(r.perm.source[a], r.perm.source[b]);
            }
        }
        r.sweeps = s + 1;
        r.trace.push_back(total_energy());
    }
    return r;
}

} // namespace pet
