#include <benchmark/benchmark.h>

#include "vsyn/pipeline.hpp"
#include "vsyn/synthgen.hpp"

namespace {

vsyn::SceneSpec traffic_scene(std::int64_t frames) {
    vsyn::SceneSpec spec;
    spec.width = 640;
    spec.height = 480;
    spec.fps = 30.0;
    spec.duration_frames = frames;
    spec.seed = 3;
    for (int i = 0; i < 6; ++i) {
        vsyn::SceneObject obj;
        obj.id = i + 1;
        obj.color = {static_cast<std::uint8_t>(120 + 20 * i), 80, 60};
        obj.w = 40;
        obj.h = 28;
        obj.entry_frame = 1 + i * 10;
        const double y = 60.0 + i * 64.0;
        obj.waypoints = {{obj.entry_frame, {30.0, y}}, {frames - 1 - i * 5, {600.0, y}}};
        spec.objects.push_back(obj);
    }
    return spec;
}

void BM_SynopsizeEndToEnd(benchmark::State& state) {
    const auto spec = traffic_scene(120);
    for (auto _ : state) {
        vsyn::SyntheticSource source(spec);
        vsyn::PipelineConfig config;
        config.synopsis.cluster_size = 5;
        benchmark::DoNotOptimize(vsyn::run_synopsize(source, nullptr, config));
    }
    state.SetItemsProcessed(state.iterations() * 120);
}

}  // namespace

BENCHMARK(BM_SynopsizeEndToEnd)->Unit(benchmark::kMillisecond)->MinTime(2.0);

BENCHMARK_MAIN();
