#include "pet/stack.hpp"

#include "pet/errors.hpp"

namespace pet {

ImageF EstimateStack::mean_image() const {
    ImageF out(width, height, channels);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int n = count(x, y);
            float* dst = out.pixel(x, y);
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += estimate(x, y, k)[c];
                dst[c] = float(acc / double(n));
            }
        }
    return out;
}

ImageF apply_selection(const EstimateStack& stack, const SelectionImage& sel) {
    if (sel.width != stack.width || sel.height != stack.height)
        throw ConfigError("apply_selection: selection shape mismatch");
    ImageF out(stack.width, stack.height, stack.channels);
    for (int y = 0; y < stack.height; ++y)
        for (int x = 0; x < stack.width; ++x) {
            const int k = sel.at(x, y);
            if (k >= stack.count(x, y))
                throw ConfigError("apply_selection: selection index out of range");
            const float* e = stack.estimate(x, y, k);
            float* dst = out.pixel(x, y);
            for (int c = 0; c < stack.channels; ++c) dst[c] = e[c];
        }
    return out;
}

} // namespace pet
