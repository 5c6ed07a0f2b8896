#pragma once

#include <cstdint>
#include <vector>

#include "pet/image.hpp"
#include "pet/incremental.hpp"
#include "pet/masks.hpp"
#include "pet/model.hpp"
#include "pet/stack.hpp"
#include "pet/synth.hpp"
#include "pet/vertical.hpp"

namespace pet {

// Pixel relocation map: source[i] is the index of the input pixel whose
// estimate is displayed at position i. Always a bijection.
struct Permutation {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> source;

    Permutation() = default;
    static Permutation identity(int w, int h);
    bool is_bijection() const;
};

ImageF apply_permutation(const ImageF& img, const Permutation& pi);

// Relocation cost d(origin, position). Disk: free up to Euclidean radius r,
// forbidden beyond. CostMap: a per-offset cost table (offset = position -
// origin, |offset|_inf <= extent) scaled by `weight`; the scale is a user
// parameter — pass ||g||_1^2 for the energy-bound-derived scaling.
struct Dissimilarity {
    enum class Kind { Disk, CostMap } kind = Kind::Disk;
    double radius = 1.0;
    int extent = 0;
    std::vector<double> cost;  // (2*extent+1)^2, row-major, origin centered
    double weight = 0.0;

    static Dissimilarity disk(double r) {
        Dissimilarity d;
        d.kind = Kind::Disk;
        d.radius = r;
        return d;
    }
    static Dissimilarity cost_map(int extent, std::vector<double> cost, double weight);

    bool allowed(int dx, int dy) const;
    double at(int dx, int dy) const;  // finite cost contribution (CostMap), 0 for Disk
};

struct HorizontalResult {
    Permutation perm;
    ImageF image;               // predicted/re-rendered pixels after relocation
    std::vector<double> trace;  // trace[0] = initial energy, then one per sweep
    int sweeps = 0;
};

// Greedy local swap search over permutations: starting from the identity,
// sweep pixels; at each pixel consider swapping with every neighbor within
// the (2R+1)^2 window whose relocation stays admissible, take the best
// strictly-improving swap (ties keep the current assignment). Energy deltas
// come from the O(1) incremental engine on tone-mapped values; the
// dissimilarity term is added for cost-map mode. Stops early on a
// zero-accept sweep.
// With aux planes the search runs on demodulated values: the displayed value
// at position i under source j is alpha_i * demod_j + beta_i, and the
// returned image is that re-rendering (raw, un-tone-mapped).
HorizontalResult horizontal_minimize(const ImageF& est, const ImageF& surrogate,
                                     const PerceptualModel& m, const Dissimilarity& d,
                                     int search_radius, int sweeps,
                                     Traversal order = Traversal::Serpentine,
                                     const AuxPlanes* aux = nullptr);

// Tile-wise order-statistics baseline: within each tile (clipped at the
// image edge), the pixel with the s-th smallest luminance is relocated to
// the position holding the s-th smallest mask threshold. The mask tiles
// toroidally when its size differs from the image. Returns the permuted
// input as image; trace is empty.
HorizontalResult permutation_baseline(const ImageF& est, const DitherMask& mask, int tile);

// Redistributes the pixels of `img` by random greedy pair swaps so that
// ||k * img||^2 shrinks — the image is treated as its own error (zero
// reference), and its value histogram is exactly preserved. `sweeps` rounds
// of N seeded candidate pairs each; supports spatially varying kernels.
HorizontalResult shaped_noise(const ImageF& img, const Kernel& k, int sweeps, uint64_t seed);

struct AprioriResult {
    Permutation perm;
    std::vector<double> trace;
    int sweeps = 0;
};

// Sample-layout optimization before rendering: per-pixel sample sets are
// scored against a bank of analytic integrands through the progressive
// a-priori energy sum_t sum_k w[t][k] * ||g*Q_{t,k} - I_t||^2, where Q_{t,k}
// is the k-prefix running-mean estimate. Greedy seeded pair swaps relocate
// whole sample sets; zero-weight planes never block a swap (all-zero weights
// keep the identity).
AprioriResult apriori_optimize(const IntegrandBank& bank, const EstimateStack& samples,
                               const std::vector<std::vector<double>>& weights,
                               const PerceptualModel& m, int sweeps, uint64_t seed);

} // namespace pet
