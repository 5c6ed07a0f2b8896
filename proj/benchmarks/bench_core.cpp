// Micro-benchmarks for the hot paths: convolution, constant-time energy
// deltas vs. full recomputation, optimizer sweeps, spectra, and mask
// generation. Run ./pet_bench --benchmark_filter=... to narrow down.

#include <benchmark/benchmark.h>

#include <array>

#include "pet/analysis.hpp"
#include "pet/convolve.hpp"
#include "pet/horizontal.hpp"
#include "pet/image.hpp"
#include "pet/incremental.hpp"
#include "pet/kernel.hpp"
#include "pet/masks.hpp"
#include "pet/model.hpp"
#include "pet/rng.hpp"
#include "pet/stack.hpp"
#include "pet/synth.hpp"
#include "pet/vertical.hpp"

namespace {

using namespace pet;

ImageF random_image(int w, int h, int c, uint64_t seed) {
    ImageF img(w, h, c);
    CounterRng rng(seed);
    for (float& v : img.data) v = rng.next_float();
    return img;
}

EstimateStack binary_stack(int w, int h, int m, uint64_t seed) {
    SceneSpec sc;
    sc.kind = SceneSpec::Kind::Binary;
    sc.width = w;
    sc.height = h;
    sc.m = m;
    sc.density = 0.5;
    sc.seed = seed;
    return generate(sc).stack;
}

ImageF constant_image(int w, int h, float v) {
    ImageF img(w, h, 1);
    std::fill(img.data.begin(), img.data.end(), v);
    return img;
}

PerceptualModel flat_model() {
    PerceptualModel m;
    m.g = Kernel::binomial3();
    m.h = Kernel::binomial3();
    m.tonemap = ToneMap::Identity;
    return m;
}

void BM_Convolve(benchmark::State& state) {
    const int n = int(state.range(0));
    const ImageF img = random_image(n, n, 1, 1);
    const Kernel g = Kernel::gaussian(1.5);
    for (auto _ : state) {
        ImageF out = convolve(img, g, Boundary::LeakyZeroPad);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Convolve)->Arg(64)->Arg(256);

void BM_IncrementalTrial(benchmark::State& state) {
    const int n = int(state.range(0));
    const ImageF est = random_image(n, n, 1, 2);
    const ImageF surr = constant_image(n, n, 0.5f);
    IncrementalState inc = IncrementalState::init_from_model(est, surr, flat_model());
    PixelDelta u{n / 2, n / 2, {0.25, 0.0, 0.0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(inc.trial_update(u));
        u.d[0] = -u.d[0];
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_IncrementalTrial)->Arg(64)->Arg(256);

// The cost the incremental engine avoids: recomputing the full energy.
void BM_FullEnergyRecompute(benchmark::State& state) {
    const int n = int(state.range(0));
    const ImageF est = random_image(n, n, 1, 2);
    const ImageF surr = constant_image(n, n, 0.5f);
    const PerceptualModel m = flat_model();
    for (auto _ : state) benchmark::DoNotOptimize(perceptual_energy(est, surr, m));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FullEnergyRecompute)->Arg(64)->Arg(256);

void BM_VerticalSweep(benchmark::State& state) {
    const int n = int(state.range(0));
    const EstimateStack stack = binary_stack(n, n, 4, 3);
    const ImageF surr = constant_image(n, n, 0.5f);
    const PerceptualModel m = flat_model();
    for (auto _ : state) {
        VerticalResult r = iterative_minimize(stack, surr, m, 1, 7);
        benchmark::DoNotOptimize(r.image.data.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_VerticalSweep)->Arg(64)->Arg(128);

void BM_HorizontalSweep(benchmark::State& state) {
    const int n = int(state.range(0));
    ImageF img(n, n, 1);
    CounterRng rng(5);
    for (float& v : img.data) v = float(rng.next_below(2));
    const ImageF surr = constant_image(n, n, 0.5f);
    const PerceptualModel m = flat_model();
    for (auto _ : state) {
        HorizontalResult r = horizontal_minimize(img, surr, m, Dissimilarity::disk(1.5), 1, 1);
        benchmark::DoNotOptimize(r.image.data.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_HorizontalSweep)->Arg(64)->Arg(128);

void BM_PowerSpectrum(benchmark::State& state) {
    const int n = int(state.range(0));
    const ImageF img = random_image(n, n, 1, 9);
    for (auto _ : state) {
        Spectrum s = power_spectrum(img);
        benchmark::DoNotOptimize(s.power.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PowerSpectrum)->Arg(64)->Arg(256);

void BM_VoidAndCluster(benchmark::State& state) {
    const int n = int(state.range(0));
    for (auto _ : state) {
        DitherMask mask = void_and_cluster(n, n, 11);
        benchmark::DoNotOptimize(mask.ranks.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_VoidAndCluster)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
