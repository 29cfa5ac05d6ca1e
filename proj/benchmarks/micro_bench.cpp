#include <benchmark/benchmark.h>

#include "gravnet/graph.hpp"
#include "gravnet/model.hpp"
#include "gravnet/physics.hpp"
#include "gravnet/rng.hpp"

using namespace gravnet;

namespace {

std::vector<Vec3> random_positions(std::size_t n, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Vec3> pos(n);
    for (auto& p : pos) p = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 1)};
    return pos;
}

void bm_pairwise_accelerations(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    auto pos = random_positions(n, 1);
    std::vector<double> masses(n, 1.0 / static_cast<double>(n));
    for (auto _ : state)
        benchmark::DoNotOptimize(pairwise_accelerations(pos, masses, 4.5e-6, 0.05));
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(bm_pairwise_accelerations)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

void bm_knn(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    auto pos = random_positions(n, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(knn_neighbors(pos, 8));
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(bm_knn)->RangeMultiplier(2)->Range(64, 4096)->Complexity();

void bm_model_forward(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    auto pos = random_positions(n, 3);
    SplitMix64 rng(4);
    Matrix features(n, 4), labels(n, 3);
    for (double& v : features.data) v = rng.uniform(-1, 1);
    FrameGraph g = build_graph(pos, std::move(features), std::move(labels), GraphConfig{8, false});

    ModelConfig mc;
    mc.d = 64;
    mc.num_layers = 2;
    ModelParams params = init_params(mc);
    for (auto _ : state)
        benchmark::DoNotOptimize(model_forward(g, params));
    state.SetComplexityN(static_cast<int64_t>(n));
}
BENCHMARK(bm_model_forward)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

} // namespace

BENCHMARK_MAIN();
