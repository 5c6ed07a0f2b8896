#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pet/image.hpp"
#include "pet/kernel.hpp"
#include "pet/model.hpp"

namespace pet {

// Kernel autocorrelation tables.
// Uniform g: C_gg(x) = sum_v g(v-x)*g(v), tabulated for |x|_inf <= 2K.
// Varying g: the sums run over output pixels i with per-pixel kernels,
//   diag(x)      = sum_i g_{i,x}^2
//   pair(x,y)    = sum_i g_{i,x} * g_{i,y},  stored for |y-x|_inf <= 2K only
// (the dense NxN table is never built; supports beyond 2K cannot overlap).
struct AutoCorr {
    int radius = 0;
    bool varying = false;
    // uniform: (4K+1)^2 table indexed by offset
    std::vector<double> table;
    // varying: per-pixel tables
    int width = 0, height = 0;
    std::vector<double> diag;  // W*H
    std::vector<double> pair;  // W*H*(4K+1)^2, entry d = y-x

    int span() const { return 4 * radius + 1; }

    double at_offset(int dx, int dy) const {
        if (dx < -2 * radius || dx > 2 * radius || dy < -2 * radius || dy > 2 * radius)
            return 0.0;
        return table[(dy + 2 * radius) * span() + (dx + 2 * radius)];
    }
    double at_pair(int x, int y, int x2, int y2) const {
        const int dx = x2 - x, dy = y2 - y;
        if (dx < -2 * radius || dx > 2 * radius || dy < -2 * radius || dy > 2 * radius)
            return 0.0;
        return pair[(size_t(y) * width + x) * span() * span() +
                    size_t(dy + 2 * radius) * span() + (dx + 2 * radius)];
    }
};

AutoCorr precompute_autocorr(const Kernel& g);

// One pixel's contribution to a (possibly multi-pixel) update: the
// per-channel value delta applied at (x,y). Deltas live in the same space as
// the state's estimate image (tone-mapped when the optimizers drive it).
struct PixelDelta {
    int x = 0, y = 0;
    std::array<double, 3> d = {0.0, 0.0, 0.0};
};

// Incrementally maintained energy
//   E = sum_c lambda_c * || g*est_c - target_c ||^2
// over the leaky (zero-pad extended) support for uniform kernels, or the
// image support for varying kernels. The state never stores the estimate
// image itself; it tracks the cross-correlation C_c(x) = <g(.-x), D_c> and a
// log of accepted deltas that is folded into the table lazily.
//
// trial_update computes the exact energy change of applying all given deltas
// simultaneously, in O(n_updates^2 + n_updates * log_size) independent of
// image size. accept applies deltas (recomputing the same trial value) and
// folds the log into the table once it exceeds n_max.
class IncrementalState {
public:
    // target must be the already-filtered reference arm:
    //   uniform g: extended support (W+2P)x(H+2P) with P >= g.radius
    //   varying g: image support WxH
    // est is the current estimate image (same space as the energy's T(est)).
    static IncrementalState init(const Kernel& g, const ImageF& est, const ImageF& target,
                                 std::array<double, 3> lambda = {1.0, 1.0, 1.0},
                                 int n_max = 64);

    // Convenience: builds the target arm from a reference image and model
    // (target = h * T(ref) on the right support), tone-maps est, and
    // initializes. Throws ConfigError for reflect boundaries.
    static IncrementalState init_from_model(const ImageF& est, const ImageF& ref,
                                            const PerceptualModel& m, int n_max = 64);

    double energy() const { return energy_; }
    int channels() const { return channels_; }
    int log_size() const { return int(log_.size()); }
    const AutoCorr& autocorr() const { return auto_; }

    // Energy change of applying all deltas at once. Does not mutate.
    double trial_update(std::span<const PixelDelta> updates) const;
    double trial_update(const PixelDelta& u) const { return trial_update({&u, 1}); }

    // Swap convenience: value exchange between two pixels expressed as two
    // simultaneous deltas.
    double trial_swap(const PixelDelta& a, const PixelDelta& b) const {
        const PixelDelta u[2] = {a, b};
        return trial_update({u, 2});
    }

    // Applies the deltas: energy += trial_update(updates), log grows; the log
    // folds into the cross-correlation table when it exceeds n_max.
    void accept(std::span<const PixelDelta> updates);
    void accept(const PixelDelta& u) { accept({&u, 1}); }

    // Force the pending log into the table now.
    void rebuild();

private:
    // C_c(x) for x inside the image, including everything already folded.
    double folded_xcorr(int x, int y, int c) const;

    int width_ = 0, height_ = 0, channels_ = 1;
    int pad_ = 0;
    std::array<double, 3> lambda_ = {1.0, 1.0, 1.0};
    AutoCorr auto_;
    std::vector<double> xcorr_;  // W*H*channels
    std::vector<PixelDelta> log_;
    size_t n_max_ = 64;
    double energy_ = 0.0;
};

} // namespace pet
