#pragma once

#include <cstdint>
#include <vector>

namespace pet {

// Ordered dither mask: ranks are a bijection onto 0..N-1; thresholds are the
// centered normalization (rank+0.5)/N, so they lie strictly inside (0,1) and
// every threshold level yields exactly `level` pixels below it.
struct DitherMask {
    int width = 0;
    int height = 0;
    std::vector<uint32_t> ranks;
    std::vector<float> thresholds;

    float threshold_at(int x, int y) const {
        return thresholds[size_t(y % height) * width + (x % width)];
    }
};

// Recomputes thresholds from ranks ((rank+0.5)/N).
void refresh_thresholds(DitherMask& mask);

// Blue-noise mask via void-and-cluster relaxation on a torus:
//  1. seed ~initial_density random minority pixels and relax them to a
//     fixed point (move tightest cluster to largest void until stable);
//  2. rank the prototype's pixels by successive tightest-cluster removal;
//  3. rank the remaining pixels by successive largest-void insertion.
// The cluster/void field is a full-image toroidally wrapped Gaussian of the
// given sigma; ties break on the smallest linear index, so generation is
// fully deterministic for a given seed.
DitherMask void_and_cluster(int width, int height, uint64_t seed, double sigma = 1.5,
                            double initial_density = 0.1);

// Uniform random rank permutation (white-noise mask); the comparison
// baseline for mask quality.
DitherMask white_noise_mask(int width, int height, uint64_t seed);

} // namespace pet
