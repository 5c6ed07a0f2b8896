#include "pet/vertical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pet/errors.hpp"
#include "pet/rng.hpp"

namespace pet {

namespace {

void check_surrogate(const EstimateStack& stack, const ImageF& surrogate) {
    if (surrogate.width != stack.width || surrogate.height != stack.height ||
        surrogate.channels != stack.channels)
        throw ConfigError("vertical: surrogate shape does not match stack");
}

// Visits every pixel exactly once: row by row (serpentine alternates
// direction per row), or in a per-sweep shuffled order for Traversal::Random.
template <typename Fn>
void sweep_pixels(int W, int H, Traversal order, uint64_t seed, int sweep, Fn&& fn) {
    if (order == Traversal::Random) {
        std::vector<int> idx(size_t(W) * H);
        std::iota(idx.begin(), idx.end(), 0);
        CounterRng rng(seed, 0x6f72 + uint64_t(sweep) * 0x9e3779b9u);
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

SelectionImage random_selection(const EstimateStack& stack, uint64_t seed) {
    SelectionImage sel(stack.width, stack.height);
    for (int y = 0; y < stack.height; ++y)
        for (int x = 0; x < stack.width; ++x) {
            const int n = stack.count(x, y);
            if (n > 1) {
                CounterRng rng = pixel_rng(seed, x, y, 0x1417);
                sel.at(x, y) = uint16_t(rng.next_below(uint64_t(n)));
            }
        }
    return sel;
}

} // namespace

VerticalResult iterative_minimize(const EstimateStack& stack, const ImageF& surrogate,
                                  const PerceptualModel& m, int sweeps, uint64_t seed,
                                  Traversal order) {
    check_surrogate(stack, surrogate);
    if (sweeps < 0) throw ConfigError("iterative_minimize: negative sweep count");
    if (m.confidence < 0.0 || m.confidence > 1.0)
        throw ConfigError("iterative_minimize: confidence must lie in [0,1]");
    const int W = stack.width, H = stack.height, C = stack.channels;
    const bool use_confidence = m.confidence < 1.0;

    VerticalResult r;
    r.selection = random_selection(stack, seed);
    ImageF cur_raw = apply_selection(stack, r.selection);
    ImageF cur_tm = tonemap_image(m.tonemap, cur_raw);
    const ImageF init_raw = cur_raw;  // confidence anchor

    IncrementalState state = IncrementalState::init_from_model(cur_raw, surrogate, m);

    const double conf = m.confidence;
    const double l1 = use_confidence ? m.g.l1() : 0.0;
    double dev2 = 0.0;  // ||cur_raw - init_raw||^2, only tracked in confidence mode
    auto objective = [&]() {
        if (!use_confidence) return state.energy();
        const double root = (1.0 - conf) * l1 * std::sqrt(dev2) +
                            conf * std::sqrt(std::max(state.energy(), 0.0));
        return root * root;
    };
    r.trace.push_back(objective());

    for (int s = 0; s < sweeps; ++s) {
        int accepted = 0;
        sweep_pixels(W, H, order, seed, s, [&](int x, int y) {
            const int n = stack.count(x, y);
            if (n <= 1) return;
            const int cur = r.selection.at(x, y);
            PixelDelta u;
            u.x = x;
            u.y = y;
            int best = cur;
            double best_metric = 0.0;  // plain: delta; confidence: new_score - score
            double cur_score = 0.0;
            if (use_confidence)
                cur_score = (1.0 - conf) * l1 * std::sqrt(dev2) +
                            conf * std::sqrt(std::max(state.energy(), 0.0));
            for (int k = 0; k < n; ++k) {
                if (k == cur) continue;
                const float* cand = stack.estimate(x, y, k);
                for (int c = 0; c < C; ++c)
                    u.d[size_t(c)] =
                        double(tonemap_value(m.tonemap, cand[c])) - double(cur_tm.at(x, y, c));
                const double de = state.trial_update(u);
                double metric;
                if (!use_confidence) {
                    metric = de;
                } else {
                    double ddev = 0.0;
                    const float* init = init_raw.pixel(x, y);
                    const float* curp = cur_raw.pixel(x, y);
                    for (int c = 0; c < C; ++c) {
                        const double a = double(cand[c]) - double(init[c]);
                        const double b = double(curp[c]) - double(init[c]);
                        ddev += a * a - b * b;
                    }
                    const double new_score =
                        (1.0 - conf) * l1 * std::sqrt(std::max(dev2 + ddev, 0.0)) +
                        conf * std::sqrt(std::max(state.energy() + de, 0.0));
                    metric = new_score - cur_score;
                }
                if (metric < best_metric) {
                    best_metric = metric;
                    best = k;
                }
            }
            if (best != cur) {
                const float* cand = stack.estimate(x, y, best);
                for (int c = 0; c < C; ++c)
                    u.d[size_t(c)] =
                        double(tonemap_value(m.tonemap, cand[c])) - double(cur_tm.at(x, y, c));
                if (use_confidence) {
                    const float* init = init_raw.pixel(x, y);
                    const float* curp = cur_raw.pixel(x, y);
                    for (int c = 0; c < C; ++c) {
                        const double a = double(cand[c]) - double(init[c]);
                        const double b = double(curp[c]) - double(init[c]);
                        dev2 += a * a - b * b;
                    }
                }
                state.accept(u);
                r.selection.at(x, y) = uint16_t(best);
                for (int c = 0; c < C; ++c) {
                    cur_raw.at(x, y, c) = cand[c];
                    cur_tm.at(x, y, c) = tonemap_value(m.tonemap, cand[c]);
                }
                ++accepted;
            }
        });
        r.sweeps = s + 1;
        r.trace.push_back(objective());
        if (accepted == 0) break;
    }
    r.image = cur_raw;
    return r;
}

VerticalResult error_diffusion(const EstimateStack& stack, const ImageF& surrogate,
                               const PerceptualModel& m, Traversal order) {
    check_surrogate(stack, surrogate);
    if (order == Traversal::Random)
        throw ConfigError("error_diffusion: traversal must be raster or serpentine");
    const int W = stack.width, H = stack.height, C = stack.channels;
    VerticalResult r;
    r.selection = SelectionImage(W, H);

    // running target in tone-mapped space, double precision, never clamped
    std::vector<double> target(size_t(W) * H * C);
    for (size_t i = 0; i < target.size(); ++i)
        target[i] = double(tonemap_value(m.tonemap, surrogate.data[i]));
    auto tgt = [&](int x, int y, int c) -> double& {
        return target[(size_t(y) * W + x) * C + c];
    };

    for (int y = 0; y < H; ++y) {
        const bool reverse = order == Traversal::Serpentine && (y & 1);
        const int dir = reverse ? -1 : 1;
        for (int x = reverse ? W - 1 : 0; x >= 0 && x < W; x += dir) {
            const int n = stack.count(x, y);
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (int k = 0; k < n; ++k) {
                const float* cand = stack.estimate(x, y, k);
                double d2 = 0.0;
                for (int c = 0; c < C; ++c) {
                    const double d = tgt(x, y, c) - double(tonemap_value(m.tonemap, cand[c]));
                    d2 += d * d;
                }
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = k;
                }
            }
            r.selection.at(x, y) = uint16_t(best);
            const float* chosen = stack.estimate(x, y, best);
            for (int c = 0; c < C; ++c) {
                const double resid = tgt(x, y, c) - double(tonemap_value(m.tonemap, chosen[c]));
                // Floyd-Steinberg, mirrored with the scan direction
                const int xa = x + dir;
                if (xa >= 0 && xa < W) tgt(xa, y, c) += resid * (7.0 / 16.0);
                if (y + 1 < H) {
                    const int xb = x - dir;
                    if (xb >= 0 && xb < W) tgt(xb, y + 1, c) += resid * (3.0 / 16.0);
                    tgt(x, y + 1, c) += resid * (5.0 / 16.0);
                    if (xa >= 0 && xa < W) tgt(xa, y + 1, c) += resid * (1.0 / 16.0);
                }
            }
        }
    }
    r.image = apply_selection(stack, r.selection);
    r.trace = {perceptual_energy(r.image, surrogate, m)};
    r.sweeps = 1;
    return r;
}

VerticalResult dither(const EstimateStack& stack, const ImageF& surrogate,
                      const DitherMask& mask, const PerceptualModel& m) {
    check_surrogate(stack, surrogate);
    if (mask.width <= 0 || mask.height <= 0) throw ConfigError("dither: empty mask");
    const int W = stack.width, H = stack.height, C = stack.channels;
    VerticalResult r;
    r.selection = SelectionImage(W, H);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double ref_lum = 0.0;
            {
                float tv[3];
                for (int c = 0; c < C; ++c)
                    tv[c] = tonemap_value(m.tonemap, surrogate.at(x, y, c));
                ref_lum = luminance_of(tv, C);
            }
            const int n = stack.count(x, y);
            int lo = -1, hi = -1, kmin = 0, kmax = 0;
            double lo_lum = 0.0, hi_lum = 0.0, min_lum = 0.0, max_lum = 0.0;
            for (int k = 0; k < n; ++k) {
                const float* cand = stack.estimate(x, y, k);
                float tv[3];
                for (int c = 0; c < C; ++c) tv[c] = tonemap_value(m.tonemap, cand[c]);
                const double lum = luminance_of(tv, C);
                if (k == 0 || lum < min_lum) {
                    min_lum = lum;
                    kmin = k;
                }
                if (k == 0 || lum > max_lum) {
                    max_lum = lum;
                    kmax = k;
                }
                if (lum <= ref_lum && (lo < 0 || lum > lo_lum)) {
                    lo = k;
                    lo_lum = lum;
                }
                if (lum > ref_lum && (hi < 0 || lum < hi_lum)) {
                    hi = k;
                    hi_lum = lum;
                }
            }
            int chosen;
            if (lo < 0) {
                chosen = kmin;  // everything lies above the surrogate
            } else if (hi < 0) {
                chosen = kmax;  // everything at or below; covers exact match at the top
            } else {
                const double b = mask.threshold_at(x, y);
                chosen = (ref_lum - lo_lum) < b * (hi_lum - lo_lum) ? lo : hi;
            }
            r.selection.at(x, y) = uint16_t(chosen);
        }
    }
    r.image = apply_selection(stack, r.selection);
    r.trace = {perceptual_energy(r.image, surrogate, m)};
    r.sweeps = 1;
    return r;
}

VerticalResult histogram_baseline(const EstimateStack& stack, const DitherMask& mask) {
    if (mask.width <= 0 || mask.height <= 0) throw ConfigError("histogram: empty mask");
    const int W = stack.width, H = stack.height, C = stack.channels;
    VerticalResult r;
    r.selection = SelectionImage(W, H);
    std::vector<int> idx;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const int n = stack.count(x, y);
            idx.resize(size_t(n));
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
                return luminance_of(stack.estimate(x, y, a), C) <
                       luminance_of(stack.estimate(x, y, b), C);
            });
            const double b = mask.threshold_at(x, y);
            const int pick = std::min(n - 1, int(b * n));
            r.selection.at(x, y) = uint16_t(idx[size_t(pick)]);
        }
    }
    r.image = apply_selection(stack, r.selection);
    r.sweeps = 1;
    return r;
}

EstimateStack expand_power_set(const EstimateStack& stack, size_t limit) {
    if (stack.ragged()) throw ConfigError("expand_power_set: stack must be uniform");
    const int M = stack.m;
    if (M > 20) throw ConfigError("expand_power_set: M must be <= 20");
    if (limit < size_t(M)) throw ConfigError("expand_power_set: limit smaller than M");
    const int W = stack.width, H = stack.height, C = stack.channels;
    const size_t total = (size_t(1) << M) - 1;

    // subsets as index lists, cardinality-major, lexicographic inside
    std::vector<std::vector<int>> subsets;
    if (total <= limit) {
        std::vector<int> comb;
        for (int card = 1; card <= M; ++card) {
            comb.assign(size_t(card), 0);
            std::iota(comb.begin(), comb.end(), 0);
            while (true) {
                subsets.push_back(comb);
                int i = card - 1;
                while (i >= 0 && comb[size_t(i)] == M - card + i) --i;
                if (i < 0) break;
                ++comb[size_t(i)];
                for (int j = i + 1; j < card; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
            }
        }
    } else {
        for (int a = 0; a < M; ++a) subsets.push_back({a});
        const size_t budget = limit - size_t(M);
        const size_t pair_budget = budget > 0 ? budget - 1 : 0;
        size_t emitted = 0;
        for (int a = 0; a < M && emitted < pair_budget; ++a)
            for (int b = a + 1; b < M && emitted < pair_budget; ++b, ++emitted)
                subsets.push_back({a, b});
        if (budget > 0) {
            std::vector<int> full(size_t(M), 0);
            std::iota(full.begin(), full.end(), 0);
            subsets.push_back(std::move(full));
        }
    }

    EstimateStack out(W, H, C, int(subsets.size()));
    out.aux = stack.aux;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (size_t s = 0; s < subsets.size(); ++s) {
                float* dst = out.estimate(x, y, int(s));
                for (int c = 0; c < C; ++c) {
                    double acc = 0.0;
                    for (int k : subsets[s]) acc += double(stack.estimate(x, y, k)[c]);
                    dst[c] = float(acc / double(subsets[s].size()));
                }
            }
    return out;
}

} // namespace pet
