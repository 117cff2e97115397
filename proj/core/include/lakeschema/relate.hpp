#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lakeschema/cluster.hpp"
#include "lakeschema/index.hpp"

namespace lakeschema {

struct RelateConfig {
    double match_threshold = 0.5;  ///< on the combined per-family similarity
    double key_ratio = 0.95;       ///< min distinct_ratio for the key side
    double key_max_null = 0.05;    ///< max null_ratio for the key side
    double fk_containment = 0.8;   ///< min child-into-parent value containment
    std::size_t query_k = 0;       ///< column probes per candidate gather; 0 = auto
};

/// Column pair postulated to represent the same notion; stored canonically
/// with first <= second.
struct AttributeMatch {
    ColumnRef first;
    ColumnRef second;
    double score = 0.0;
};

/// Match lookups; identical columns always match.
class MatchSet {
public:
    void add(ColumnRef a, ColumnRef b, double score);
    bool matches(ColumnRef a, ColumnRef b) const;
    std::vector<AttributeMatch> entries() const; ///< canonical order
    std::size_t size() const { return scores_.size(); }

private:
    std::map<std::pair<ColumnRef, ColumnRef>, double> scores_;
};

/// Directed joinable-attribute edge: child values are contained in the
/// parent key attribute.
struct ForeignKeyEdge {
    ColumnRef parent;
    ColumnRef child;
    double containment = 0.0;

    friend auto operator<=>(const ForeignKeyEdge&, const ForeignKeyEdge&) = default;
};

/// Foreign keys postulated to carry one conceptual relationship.
struct RelationshipGroup {
    std::vector<ForeignKeyEdge> members;
    int parent_cluster = kNoise;
    int child_cluster = kNoise;
};

struct EntityType {
    int label = 0;
    std::vector<std::string> tables;
};

/// A relationship group with members resolved to FK identifier strings, so
/// the schema artifact is self-contained.
struct SchemaRelationship {
    int parent_cluster = 0;
    int child_cluster = 0;
    std::vector<std::string> foreign_keys;
};

struct ConceptualSchema {
    std::vector<EntityType> entity_types;
    std::vector<SchemaRelationship> relationships;
    std::vector<std::string> unclustered;                 ///< noise table ids
    std::vector<std::string> ungrouped_foreign_keys;      ///< endpoints on noise tables
    double eps = 0.0;
    int min_points = 0;
    double silhouette = kSilhouetteUndefined;
};

MatchSet infer_matches(const LakeIndex& index, const RelateConfig& cfg);

std::vector<ForeignKeyEdge> infer_foreign_keys(const LakeIndex& index,
                                               const std::vector<std::vector<ColumnProfile>>& profiles,
                                               const RelateConfig& cfg);

struct RelationshipInference {
    std::vector<RelationshipGroup> groups;      ///< creation order
    std::vector<ForeignKeyEdge> noise_edges;    ///< excluded: endpoint on a noise table
};

/// Greedy grouping of foreign keys in canonical order: an edge joins the
/// first group whose every member agrees on parent-attribute match,
/// child-attribute match, and (parent, child) cluster pair.
RelationshipInference infer_relationships(const Clustering& clustering, const MatchSet& matches,
                                          const std::vector<ForeignKeyEdge>& foreign_keys);

ConceptualSchema assemble_schema(const LakeIndex& index, const Clustering& clustering,
                                 double silhouette_score, const RelationshipInference& inference);

/// "parent_table.attr->child_table.attr"
std::string fk_identifier(const LakeIndex& index, const ForeignKeyEdge& edge);

std::string schema_to_json(const ConceptualSchema& schema);
std::string schema_to_dot(const ConceptualSchema& schema);

/// Schema facts parsed back from the JSON artifact (table ids, entity type
/// members, relationship groups as FK identifier strings).
struct SchemaDigest {
    std::vector<std::vector<std::string>> entity_tables;
    std::vector<std::vector<std::string>> relationship_fks;
    std::vector<std::string> unclustered;
    std::vector<std::string> table_ids() const;
};

SchemaDigest parse_schema_json(const std::string& text);

} // namespace lakeschema
