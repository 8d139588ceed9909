#include <benchmark/benchmark.h>

#include "../tests/support/tube_gen.hpp"
#include "vsyn/synopsis.hpp"

namespace {

void BM_Schedule40Tubes(benchmark::State& state) {
    testsupport::TubeGenOptions opt;
    opt.max_tubes = 40;
    opt.max_len = 200;
    const auto tubes = testsupport::random_tubes(5, opt);
    const int cs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        vsyn::TubeBuffer gtb;
        for (const auto& t : tubes) gtb.admit(t);
        gtb.close();
        benchmark::DoNotOptimize(vsyn::run_synopsis(gtb, {cs, vsyn::CollisionMode::box, false}, 18.0));
    }
}

}  // namespace

BENCHMARK(BM_Schedule40Tubes)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
