#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lakeschema/relate.hpp"

namespace lakeschema {

using Partition = std::vector<std::set<std::string>>;

struct GroundTruth {
    Partition clusters;
    /// nullopt when the file has no relationships section (reported N/A);
    /// an explicit empty list means "no relationships expected".
    std::optional<Partition> relationships;
};

struct PairCounts {
    std::uint64_t a = 0; ///< same cluster in both partitions
    std::uint64_t b = 0; ///< different clusters in both
    std::uint64_t c = 0; ///< same in computed, different in ground truth
    std::uint64_t d = 0; ///< different in computed, same in ground truth
};

struct RandResult {
    PairCounts counts;
    double score = 1.0;
};

struct RelationshipRandResult {
    PairCounts counts; ///< over foreign keys present on both sides
    std::uint64_t e = 0; ///< |FP| + |FN|: identifiers on one side only
    double score = 1.0;
};

/// Fraction of element pairs on which the two partitions agree. Both
/// partitions must cover the same element set; fewer than 2 elements
/// scores 1. Computed noise tables must already be singleton clusters.
RandResult rand_score(const Partition& computed, const Partition& ground_truth);

/// Rand over the shared foreign-key identifiers with the penalty term e
/// for identifiers present on one side only.
RelationshipRandResult relationship_rand_score(const Partition& computed,
                                               const Partition& ground_truth);

/// Entity types plus one singleton per unclustered table.
Partition partition_from_schema(const SchemaDigest& schema);

Partition relationships_from_schema(const SchemaDigest& schema);

struct EvalReport {
    std::size_t tables = 0;
    std::size_t clusters = 0;
    std::size_t gt_clusters = 0;
    RandResult cluster_rand;
    /// nullopt means N/A: the ground truth has no relationships section, or
    /// both sides are empty (nothing detected, nothing expected).
    std::optional<RelationshipRandResult> relationship_rand;
};

EvalReport evaluate_schema(const SchemaDigest& schema, const GroundTruth& gt);

/// Loads and validates a ground-truth JSON file:
/// {"clusters": [[table_id,...],...], "relationships": [[fk_id,...],...]}.
/// Cluster sets must be disjoint and reference known tables; relationship
/// identifiers must be unique and reference known tables.
GroundTruth load_ground_truth(const std::filesystem::path& path,
                              const std::vector<std::string>& known_table_ids);

} // namespace lakeschema
