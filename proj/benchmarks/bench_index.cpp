#include <benchmark/benchmark.h>

#include <random>

#include "lakeschema/index.hpp"
#include "lakeschema/ingest.hpp"

using namespace lakeschema;

namespace {

// Synthetic lake: `n_tables` tables drawn from a shared vocabulary, a mix of
// textual and numeric columns, mild cross-table overlap.
std::vector<Table> synthetic_lake(std::size_t n_tables, std::size_t rows, std::uint64_t seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_int_distribution<int> vocab(0, 500);
    std::uniform_real_distribution<double> real(0.0, 1000.0);
    std::vector<std::string> headers = {"id", "name", "city", "amount", "code", "label"};

    std::vector<Table> tables;
    for (std::size_t t = 0; t < n_tables; ++t) {
        Table table;
        table.id = "bench_" + std::to_string(t);
        table.name = table.id + ".csv";
        for (std::size_t c = 0; c < headers.size(); ++c) {
            Column col;
            col.table_id = table.id;
            col.name = headers[c];
            col.ordinal = c;
            for (std::size_t r = 0; r < rows; ++r) {
                if (c == 0) {
                    col.values.push_back(std::to_string(t * rows + r));
                } else if (c == 3) {
                    col.values.push_back(std::to_string(real(rng)));
                } else {
                    col.values.push_back("w" + std::to_string(vocab(rng)));
                }
            }
            table.columns.push_back(std::move(col));
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

struct BuiltLake {
    std::vector<Table> tables;
    std::vector<std::vector<ColumnProfile>> profiles;
    LakeIndex index;
};

BuiltLake built_lake(std::size_t n_tables, std::size_t rows) {
    BuiltLake b;
    b.tables = synthetic_lake(n_tables, rows, 99);
    b.profiles = profile_tables(b.tables, {}, 1);
    b.index = LakeIndex::build(b.tables, b.profiles, {}, 1);
    return b;
}

} // namespace

static void BM_ProfileTables(benchmark::State& state) {
    auto tables = synthetic_lake(static_cast<std::size_t>(state.range(0)), 200, 7);
    for (auto _ : state) {
        auto profiles = profile_tables(tables, {}, 1);
        benchmark::DoNotOptimize(profiles);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProfileTables)->Arg(8)->Arg(32);

static void BM_BuildIndexes(benchmark::State& state) {
    auto tables = synthetic_lake(static_cast<std::size_t>(state.range(0)), 200, 7);
    auto profiles = profile_tables(tables, {}, 1);
    for (auto _ : state) {
        LakeIndex index = LakeIndex::build(tables, profiles, {}, 1);
        benchmark::DoNotOptimize(index);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildIndexes)->Arg(8)->Arg(32);

static void BM_QueryColumn(benchmark::State& state) {
    auto lake = built_lake(32, 200);
    std::size_t i = 0;
    for (auto _ : state) {
        ColumnRef ref{static_cast<std::uint32_t>(i++ % lake.index.table_count()), 1};
        auto nbrs = lake.index.query_column(FeatureFamily::Value, ref, 10);
        benchmark::DoNotOptimize(nbrs);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QueryColumn);

static void BM_TableDistance(benchmark::State& state) {
    auto lake = built_lake(16, 200);
    std::size_t i = 0;
    for (auto _ : state) {
        std::uint32_t a = static_cast<std::uint32_t>(i % lake.index.table_count());
        std::uint32_t b = static_cast<std::uint32_t>((i + 7) % lake.index.table_count());
        ++i;
        benchmark::DoNotOptimize(lake.index.table_distance(a, b));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TableDistance);

static void BM_QueryTableNeighbours(benchmark::State& state) {
    auto lake = built_lake(32, 200);
    std::size_t i = 0;
    for (auto _ : state) {
        auto nbrs = lake.index.query_table_neighbours(
            static_cast<std::uint32_t>(i++ % lake.index.table_count()),
            lake.index.table_count());
        benchmark::DoNotOptimize(nbrs);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QueryTableNeighbours);

BENCHMARK_MAIN();
