#include "lakeschema/pipeline.hpp"

#include <chrono>

#include "lakeschema/util.hpp"

namespace lakeschema {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void check_index_matches_lake(const LakeIndex& index, const std::vector<Table>& tables) {
    if (index.table_count() != tables.size()) {
        throw FatalError("index artifact does not match the input directory (table count)");
    }
    for (std::size_t t = 0; t < tables.size(); ++t) {
        if (index.table_id(static_cast<std::uint32_t>(t)) != tables[t].id ||
            index.column_count(static_cast<std::uint32_t>(t)) != tables[t].columns.size()) {
            throw FatalError("index artifact does not match the input directory (table " +
                             tables[t].id + ")");
        }
    }
}

} // namespace

PipelineResult run_pipeline(const std::filesystem::path& input_dir, const RunConfig& cfg,
                            const std::optional<std::filesystem::path>& index_artifact) {
    cfg.index.validate();
    const int threads = resolve_threads(cfg.threads);

    PipelineResult r;

    {
        Stopwatch sw;
        LoadResult loaded = load_lake(input_dir, cfg.lake);
        r.tables = std::move(loaded.tables);
        r.skipped = std::move(loaded.skipped);
        r.profiles = profile_tables(r.tables, cfg.lake, threads);
        r.timings.data_profiling_s = sw.seconds();
    }

    {
        Stopwatch sw;
        if (index_artifact) {
            r.index = LakeIndex::load(*index_artifact);
            check_index_matches_lake(r.index, r.tables);
            r.index.set_family_weights(cfg.index.family_weights);
        } else {
            r.index = LakeIndex::build(r.tables, r.profiles, cfg.index, threads, cfg.lake);
        }
        r.timings.build_indexes_s = sw.seconds();
    }

    const std::size_t k = cfg.k > 0 ? cfg.k : r.tables.size(); // conservative default
    {
        Stopwatch sw;
        r.distances = build_distance_matrix(r.index, k, threads);
        r.timings.build_distance_matrix_s = sw.seconds();
    }

    {
        Stopwatch sw;
        r.tuned = tune_and_cluster(r.distances, cfg.grid);
        r.timings.cluster_s = sw.seconds();
        if (r.tuned.degenerate) {
            r.warnings.push_back("no grid configuration produced a scoreable clustering; "
                                 "all tables reported as unclustered");
        }
    }

    {
        Stopwatch sw;
        r.matches = infer_matches(r.index, cfg.relate);
        r.foreign_keys = infer_foreign_keys(r.index, r.profiles, cfg.relate);
        RelationshipInference inference =
            infer_relationships(r.tuned.clustering, r.matches, r.foreign_keys);
        r.schema = assemble_schema(r.index, r.tuned.clustering, r.tuned.silhouette, inference);
        r.timings.infer_relationships_s = sw.seconds();
    }

    return r;
}

} // namespace lakeschema
