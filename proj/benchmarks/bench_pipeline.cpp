#include <benchmark/benchmark.h>

#include <random>

#include "snnrpn/meanshift.hpp"
#include "snnrpn/pipeline.hpp"
#include "snnrpn/synth.hpp"

namespace {

const snnrpn::synth::SynthOutput& traffic_scene() {
    static const auto out = [] {
        auto spec = snnrpn::synth::preset("traffic-50m-day", 7);
        spec.duration_s = 5.0;
        return snnrpn::synth::gen_scene(spec);
    }();
    return out;
}

snnrpn::PipelineConfig config_for(std::int64_t window) {
    snnrpn::PipelineConfig cfg;
    cfg.window = static_cast<int>(window);
    cfg.stride = static_cast<int>(window * 3 / 4);
    cfg.duration_s = 5.0;
    return cfg;
}

void BM_Denoise(benchmark::State& state) {
    const auto& scene = traffic_scene();
    const auto cfg = config_for(16);
    for (auto _ : state) {
        benchmark::DoNotOptimize(snnrpn::denoise(scene.events, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.events.size()));
}
BENCHMARK(BM_Denoise)->Unit(benchmark::kMillisecond);

void BM_RunPipeline(benchmark::State& state) {
    const auto& scene = traffic_scene();
    const auto cfg = config_for(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(snnrpn::run_pipeline(scene.events, cfg));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.events.size()));
}
BENCHMARK(BM_RunPipeline)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_MeanShift(benchmark::State& state) {
    const auto& scene = traffic_scene();
    const auto cfg = config_for(16);
    const auto spikes = snnrpn::denoise(scene.events, cfg);
    const auto frames = snnrpn::frame_count(scene.events, cfg);
    const snnrpn::meanshift::MsConfig ms;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            snnrpn::meanshift::run_meanshift(spikes, cfg.sensor, ms, cfg.fps, frames));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spikes.size()));
}
BENCHMARK(BM_MeanShift)->Unit(benchmark::kMillisecond);

void BM_ClusterFrame(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> ox(0, 224), oy(0, 164);
    std::vector<snnrpn::ProposalBox> boxes;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        const int x = ox(rng), y = oy(rng);
        boxes.push_back({{x, y, x + 16, y + 16}, static_cast<snnrpn::Timestamp>(i)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(snnrpn::cluster_frame(boxes));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClusterFrame)->RangeMultiplier(4)->Range(4, 256)->Complexity();

}  // namespace

BENCHMARK_MAIN();
