#pragma once

#include "pet/image.hpp"
#include "pet/kernel.hpp"

namespace pet {

// Boundary handling for filtering and energy evaluation.
//  - LeakyZeroPad: values outside the image read as zero, and energy sums run
//    over the kernel-extended support, so error "leaking" past the border is
//    still charged. This is the default and the only mode the incremental
//    engine supports.
//  - Reflect: mirror with edge repeat (index -1 -> 0, -2 -> 1, ...); energy
//    runs over the image support only.
enum class Boundary { LeakyZeroPad, Reflect };

inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Same-size filtering: out_i = sum_v w(v) * in(i-v). Out-of-range reads
// follow the boundary mode. Varying kernels use the per-pixel table.
ImageF convolve(const ImageF& img, const Kernel& k, Boundary boundary = Boundary::LeakyZeroPad);

// Full zero-padded support: output is (W+2P) x (H+2P) with P = max(pad,
// k.radius); entry (x,y) corresponds to image position (x-P, y-P). This is
// the support the leaky energy is summed over. Uniform kernels only.
ImageF convolve_full(const ImageF& img, const Kernel& k, int pad = -1);

} // namespace pet
