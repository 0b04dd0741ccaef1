// Builder microbenchmarks on one fixed synthetic packet. The `bench` CLI
// subcommand runs the packet-sampling protocol; these are for inner-loop work.

#include <benchmark/benchmark.h>

#include "evrep/representations.hpp"
#include "evrep/synth.hpp"

namespace {

evrep::EventStream make_packet() {
    evrep::SyntheticScene scene{evrep::SensorGeometry{240, 180},
                                evrep::TimeWindow(0, 100'000),
                                {},
                                {}};
    for (int e = 0; e < 8; ++e) {
        scene.objects.push_back({evrep::VerticalEdge{static_cast<double>(e * 10)},
                                 evrep::MotionModel::constant_velocity(600.0 + 90.0 * e, 0.0)});
    }
    scene.hot_pixels.push_back({17, 23, 5000.0});
    return evrep::emit_events(scene, 42);
}

const evrep::EventStream& packet() {
    static const evrep::EventStream stream = make_packet();
    return stream;
}

void BM_Labits(benchmark::State& state) {
    evrep::LabitsConfig config;
    config.bins = static_cast<std::size_t>(state.range(0));
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_labits(stream, config));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_Labits)->Arg(16)->Arg(65);

void BM_LabitsParallel(benchmark::State& state) {
    evrep::LabitsConfig config;
    config.bins = 65;
    config.threads = 0;
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_labits(stream, config));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_LabitsParallel);

void BM_VoxelGrid(benchmark::State& state) {
    const evrep::VoxelConfig config{static_cast<std::size_t>(state.range(0)), std::nullopt};
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_voxel_grid(stream, config));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_VoxelGrid)->Arg(16)->Arg(65);

void BM_Tore(benchmark::State& state) {
    const evrep::ToreConfig config{static_cast<std::size_t>(state.range(0)), std::nullopt};
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_tore(stream, config));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_Tore)->Arg(1)->Arg(3);

void BM_TimeSurface(benchmark::State& state) {
    const evrep::TimeWindow window = evrep::natural_window(packet());
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_time_surface(stream, window));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_TimeSurface);

void BM_EventFrame(benchmark::State& state) {
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_event_frame(stream));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_EventFrame);

void BM_EventCount(benchmark::State& state) {
    const evrep::EventStream& stream = packet();
    for (auto _ : state) {
        benchmark::DoNotOptimize(evrep::build_event_count(stream));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_EventCount);

}  // namespace

BENCHMARK_MAIN();
