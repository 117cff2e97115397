#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lakeschema/cluster.hpp"
#include "lakeschema/eval.hpp"
#include "lakeschema/index.hpp"
#include "lakeschema/ingest.hpp"
#include "lakeschema/relate.hpp"

namespace lakeschema {

/// Everything one end-to-end run needs; fixed config + fixed seed makes the
/// whole run deterministic.
struct RunConfig {
    LakeConfig lake;
    IndexConfig index;
    RelateConfig relate;
    ParamGrid grid = ParamGrid::defaults();
    std::size_t k = 0; ///< table-neighbour budget; 0 = number of tables
    int threads = 0;   ///< 0 = all cores
};

/// Wall-clock seconds per stage, reported separately.
struct StageTimings {
    double data_profiling_s = 0.0;   ///< load + per-column profiling
    double build_indexes_s = 0.0;
    double build_distance_matrix_s = 0.0;
    double cluster_s = 0.0;          ///< grid search included
    double infer_relationships_s = 0.0;
};

struct PipelineResult {
    std::vector<Table> tables;
    std::vector<std::vector<ColumnProfile>> profiles;
    std::vector<SkipReport> skipped;
    LakeIndex index;
    DistanceMatrix distances;
    TuneResult tuned;
    MatchSet matches;
    std::vector<ForeignKeyEdge> foreign_keys;
    ConceptualSchema schema;
    StageTimings timings;
    std::vector<std::string> warnings;
};

/// Full run: ingest + profile, build (or reuse) indexes, distance matrix,
/// tuned clustering, matches/foreign keys, relationship grouping, schema.
/// `index_artifact`, when given, is loaded instead of building indexes.
PipelineResult run_pipeline(const std::filesystem::path& input_dir, const RunConfig& cfg,
                            const std::optional<std::filesystem::path>& index_artifact = {});

} // namespace lakeschema
