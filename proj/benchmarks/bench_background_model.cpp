#include <benchmark/benchmark.h>

#include "vsyn/background_model.hpp"
#include "vsyn/synthgen.hpp"

namespace {

vsyn::SceneSpec vga_scene() {
    vsyn::SceneSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.duration_frames = 1 << 20;
    spec.noise_sigma = 2.0;
    spec.seed = 11;
    vsyn::SceneObject obj;
    obj.id = 1;
    obj.color = {220, 60, 60};
    obj.w = 48;
    obj.h = 36;
    obj.entry_frame = 0;
    obj.waypoints = {{0, {40.0, 240.0}}, {spec.duration_frames - 1, {600.0, 240.0}}};
    spec.objects.push_back(obj);
    return spec;
}

void BM_BackgroundUpdate640x480(benchmark::State& state) {
    const vsyn::SceneSpec spec = vga_scene();
    vsyn::BackgroundModel model;
    std::int64_t i = 0;
    model.update_and_classify(vsyn::render_frame(spec, i++));
    for (auto _ : state) {
        state.PauseTiming();
        const vsyn::Frame frame = vsyn::render_frame(spec, i++);
        state.ResumeTiming();
        benchmark::DoNotOptimize(model.update_and_classify(frame));
    }
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_BackgroundUpdate640x480)->Unit(benchmark::kMillisecond);
