#include <benchmark/benchmark.h>

#include "vsyn/segmentation.hpp"

namespace {

vsyn::LabelMask busy_mask(int w, int h) {
    vsyn::LabelMask m;
    m.width = w;
    m.height = h;
    m.labels.assign(static_cast<std::size_t>(w) * h, vsyn::PixelLabel::background);
    for (int i = 0; i < 10; ++i) {
        const int x0 = 20 + i * 60, y0 = 40 + (i % 3) * 120;
        for (int y = y0; y < y0 + 40 && y < h; ++y)
            for (int x = x0; x < x0 + 50 && x < w; ++x)
                m.labels[static_cast<std::size_t>(y) * w + x] = vsyn::PixelLabel::foreground;
    }
    return m;
}

void BM_MorphClose640x480(benchmark::State& state) {
    const vsyn::BinaryMask mask = vsyn::binarize(busy_mask(640, 480));
    for (auto _ : state) benchmark::DoNotOptimize(vsyn::morph_close(mask, 1, 2));
}

void BM_DetectObjects640x480(benchmark::State& state) {
    const vsyn::LabelMask labels = busy_mask(640, 480);
    const vsyn::Frame frame(640, 480);
    for (auto _ : state) benchmark::DoNotOptimize(vsyn::detect_objects(frame, labels));
}

}  // namespace

BENCHMARK(BM_MorphClose640x480)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DetectObjects640x480)->Unit(benchmark::kMillisecond);
