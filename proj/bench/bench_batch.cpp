#include "pitchstab/batch.hpp"
#include "pitchstab/config.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace pitchstab;

namespace {

// Noisy push scenario over many seeds and all three controllers.
std::vector<ScenarioConfig> workload(std::size_t n) {
    const auto cwd = std::filesystem::current_path();
    std::filesystem::current_path(PITCHSTAB_SOURCE_DIR);
    const auto base = config::load_scenario("scenarios/push_front_noisy.json");
    std::filesystem::current_path(cwd);
    std::vector<ScenarioConfig> cs;
    for (std::size_t i = 0; i < n; ++i) {
        auto c = base;
        c.seed = 1000 + i;
        c.controller = static_cast<ControllerMode>(i % 3);
        cs.push_back(c);
    }
    return cs;
}

void BM_BatchSerial(benchmark::State& state) {
    const auto cs = workload(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(cs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchOpenMP(benchmark::State& state) {
    const auto cs = workload(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(cs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = batch_threads();
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(12)->Arg(48)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Arg(12)->Arg(48)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
