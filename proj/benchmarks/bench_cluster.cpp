#include <benchmark/benchmark.h>

#include <random>

#include "lakeschema/cluster.hpp"

using namespace lakeschema;

namespace {

DistanceMatrix random_block_matrix(std::size_t n, std::uint64_t seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> block(0, 4);

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("t" + std::to_string(i));
    DistanceMatrix d(std::move(ids));

    std::vector<int> assign(n);
    for (auto& a : assign) a = block(rng);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = assign[i] == assign[j] ? uni(rng) * 0.3 : 0.4 + uni(rng) * 0.6;
            d.update_min(i, j, v);
        }
    }
    return d;
}

} // namespace

static void BM_Dbscan(benchmark::State& state) {
    auto d = random_block_matrix(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) {
        Clustering c = dbscan(d, 0.3, 3);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dbscan)->Arg(50)->Arg(200)->Arg(500);

static void BM_Silhouette(benchmark::State& state) {
    auto d = random_block_matrix(static_cast<std::size_t>(state.range(0)), 6);
    Clustering c = dbscan(d, 0.3, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(silhouette(d, c));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Silhouette)->Arg(50)->Arg(200);

static void BM_GridSearch(benchmark::State& state) {
    auto d = random_block_matrix(static_cast<std::size_t>(state.range(0)), 7);
    ParamGrid grid = ParamGrid::defaults();
    for (auto _ : state) {
        TuneResult r = tune_and_cluster(d, grid);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GridSearch)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
