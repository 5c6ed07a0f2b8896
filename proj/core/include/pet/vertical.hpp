#pragma once

#include <cstdint>
#include <vector>

#include "pet/image.hpp"
#include "pet/incremental.hpp"
#include "pet/masks.hpp"
#include "pet/model.hpp"
#include "pet/stack.hpp"

namespace pet {

// Pixel visiting order for sweep-based optimizers. Serpentine alternates row
// direction (the default); Raster always goes left-to-right; Random visits
// every pixel exactly once per sweep in a freshly shuffled order derived from
// the optimizer's seed. Error diffusion needs a scan direction for its
// weights and rejects Random.
enum class Traversal { Serpentine, Raster, Random };

struct VerticalResult {
    SelectionImage selection;
    ImageF image;               // selected raw estimates
    std::vector<double> trace;  // trace[0] = initial energy, then one entry per sweep
    int sweeps = 0;             // sweeps actually executed
};

// Greedy per-pixel search: starting from a seeded random selection, sweep the
// image up to T times; at each pixel try every estimate via an O(1)
// incremental delta (on tone-mapped values) and keep the best strict
// improvement. Ties keep the current choice. Stops early when a sweep
// accepts nothing. With m.confidence < 1 the optimized objective becomes
//   (1-C)*||g||_1*||est - est_init||_2 + C*sqrt(E),
// where est_init is the initial (seeded) selection; C=1 short-circuits to
// the plain energy path, C=0 can accept nothing.
VerticalResult iterative_minimize(const EstimateStack& stack, const ImageF& surrogate,
                                  const PerceptualModel& m, int sweeps, uint64_t seed,
                                  Traversal order = Traversal::Serpentine);

// Multi-option error diffusion: a running target starts at the tone-mapped
// surrogate; each pixel snaps to the estimate closest to its target (L2
// across channels) and diffuses the residual with Floyd-Steinberg weights
// (7/16 ahead, 3/16, 5/16, 1/16 below), mirrored on right-to-left rows. The
// running target is deliberately left unclamped. trace = {final energy}.
VerticalResult error_diffusion(const EstimateStack& stack, const ImageF& surrogate,
                               const PerceptualModel& m,
                               Traversal order = Traversal::Serpentine);

// Mask-driven dithering: per pixel, bracket the surrogate's (tone-mapped)
// luminance with the tightest pair of estimates below/above and pick the
// lower one iff lum(I)-lum(lo) < B*(lum(hi)-lum(lo)), where B is the mask
// threshold (mask tiles toroidally). Degenerate brackets clamp to the
// nearest extreme; an exact luminance match is always chosen.
VerticalResult dither(const EstimateStack& stack, const ImageF& surrogate,
                      const DitherMask& mask, const PerceptualModel& m);

// Histogram baseline: per pixel, sort estimates by luminance and emit index
// floor(B*M) (clamped). No energy model involved; trace is empty.
VerticalResult histogram_baseline(const EstimateStack& stack, const DitherMask& mask);

// Expands each pixel's M estimates into subset averages, enumerated by
// cardinality (singletons, pairs, ... full set), lexicographic within a
// cardinality. If the full power set (2^M - 1 subsets) exceeds `limit`, only
// singletons + pairs + the full-set mean are emitted (pairs truncated to
// respect the budget, the full mean kept whenever it fits).
// Requires M <= 20 and limit >= M.
EstimateStack expand_power_set(const EstimateStack& stack, size_t limit);

} // namespace pet
