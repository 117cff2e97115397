#include "lakeschema/relate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lakeschema/util.hpp"
#include <nlohmann/json.hpp>

namespace lakeschema {

namespace {

std::pair<ColumnRef, ColumnRef> canonical_pair(ColumnRef a, ColumnRef b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::size_t auto_query_k(const LakeIndex& index, const RelateConfig& cfg) {
    if (cfg.query_k > 0) return cfg.query_k;
    return std::max<std::size_t>(32, 2 * index.table_count());
}

} // namespace

void MatchSet::add(ColumnRef a, ColumnRef b, double score) {
    if (a == b) return;
    scores_[canonical_pair(a, b)] = score;
}

bool MatchSet::matches(ColumnRef a, ColumnRef b) const {
    if (a == b) return true; // an attribute trivially represents its own notion
    return scores_.count(canonical_pair(a, b)) > 0;
}

std::vector<AttributeMatch> MatchSet::entries() const {
    std::vector<AttributeMatch> out;
    out.reserve(scores_.size());
    for (const auto& [pair, score] : scores_) {
        out.push_back({pair.first, pair.second, score});
    }
    return out;
}

MatchSet infer_matches(const LakeIndex& index, const RelateConfig& cfg) {
    if (cfg.match_threshold <= 0.0 || cfg.match_threshold > 1.0) {
        throw FatalError("match threshold must lie in (0,1]");
    }
    const std::size_t k = auto_query_k(index, cfg);

    std::set<std::pair<ColumnRef, ColumnRef>> candidates;
    for (std::size_t fi = 0; fi < kFamilyCount; ++fi) {
        const LshForestIndex& fidx = index.family_index(static_cast<FeatureFamily>(fi));
        for (ColumnRef ref : fidx.columns()) {
            for (const auto& nbr : fidx.query(ref, k)) {
                if (nbr.column.table == ref.table) continue; // self-table pairs excluded
                candidates.insert(canonical_pair(ref, nbr.column));
            }
        }
    }

    MatchSet matches;
    for (const auto& [a, b] : candidates) {
        double score = index.column_similarity(a, b);
        if (score >= cfg.match_threshold) matches.add(a, b, score);
    }
    return matches;
}

namespace {

bool key_predicate(const ColumnProfile& p, const RelateConfig& cfg) {
    return !p.degenerate && p.distinct_ratio >= cfg.key_ratio && p.null_ratio <= cfg.key_max_null;
}

double containment(const ColumnProfile& child, const ColumnProfile& parent) {
    if (child.distinct_values.empty()) return 0.0;
    std::size_t shared = 0;
    for (const auto& v : child.distinct_values) {
        if (parent.distinct_values.count(v) > 0) ++shared;
    }
    return static_cast<double>(shared) / static_cast<double>(child.distinct_values.size());
}

} // namespace

std::vector<ForeignKeyEdge> infer_foreign_keys(const LakeIndex& index,
                                               const std::vector<std::vector<ColumnProfile>>& profiles,
                                               const RelateConfig& cfg) {
    if (cfg.key_ratio <= 0.0 || cfg.key_ratio > 1.0) {
        throw FatalError("key ratio must lie in (0,1]");
    }
    if (cfg.fk_containment <= 0.0 || cfg.fk_containment > 1.0) {
        throw FatalError("fk containment threshold must lie in (0,1]");
    }
    const std::size_t k = auto_query_k(index, cfg);
    const LshForestIndex& value_index = index.family_index(FeatureFamily::Value);

    // The Value index pre-filters candidate pairs; exact containment over
    // the profiled distinct sets is the verifier.
    std::set<std::pair<ColumnRef, ColumnRef>> candidates;
    for (ColumnRef ref : value_index.columns()) {
        for (const auto& nbr : value_index.query(ref, k)) {
            if (nbr.column.table == ref.table) continue;
            candidates.insert(canonical_pair(ref, nbr.column));
        }
    }

    std::set<ForeignKeyEdge> edges;
    auto consider = [&](ColumnRef parent, ColumnRef child) {
        const ColumnProfile& pp = profiles[parent.table][parent.column];
        const ColumnProfile& cp = profiles[child.table][child.column];
        if (!key_predicate(pp, cfg)) return;
        double c = containment(cp, pp);
        if (c >= cfg.fk_containment) edges.insert({parent, child, c});
    };
    for (const auto& [a, b] : candidates) {
        consider(a, b);
        consider(b, a); // both directions may qualify
    }
    return {edges.begin(), edges.end()};
}

RelationshipInference infer_relationships(const Clustering& clustering, const MatchSet& matches,
                                          const std::vector<ForeignKeyEdge>& foreign_keys) {
    RelationshipInference result;

    std::vector<ForeignKeyEdge> ordered(foreign_keys);
    std::sort(ordered.begin(), ordered.end());

    auto label_of = [&](std::uint32_t table) { return clustering.labels[table]; };

    for (const ForeignKeyEdge& fk : ordered) {
        const int parent_cluster = label_of(fk.parent.table);
        const int child_cluster = label_of(fk.child.table);
        if (parent_cluster == kNoise || child_cluster == kNoise) {
            result.noise_edges.push_back(fk);
            continue;
        }

        bool added = false;
        for (RelationshipGroup& g : result.groups) {
            std::size_t match_count = 0;
            for (const ForeignKeyEdge& member : g.members) {
                if (matches.matches(fk.parent, member.parent) &&
                    matches.matches(fk.child, member.child) &&
                    parent_cluster == g.parent_cluster && child_cluster == g.child_cluster) {
                    ++match_count;
                }
            }
            if (match_count == g.members.size()) {
                g.members.push_back(fk);
                added = true;
                break; // first fitting group wins
            }
        }
        if (!added) {
            result.groups.push_back({{fk}, parent_cluster, child_cluster});
        }
    }
    return result;
}

std::string fk_identifier(const LakeIndex& index, const ForeignKeyEdge& edge) {
    std::ostringstream os;
    os << index.table_id(edge.parent.table) << '.' << index.column_name(edge.parent) << "->"
       << index.table_id(edge.child.table) << '.' << index.column_name(edge.child);
    return os.str();
}

ConceptualSchema assemble_schema(const LakeIndex& index, const Clustering& clustering,
                                 double silhouette_score, const RelationshipInference& inference) {
    ConceptualSchema schema;
    schema.eps = clustering.eps;
    schema.min_points = clustering.min_points;
    schema.silhouette = silhouette_score;

    const int clusters = clustering.cluster_count();
    schema.entity_types.resize(clusters);
    for (int c = 0; c < clusters; ++c) schema.entity_types[c].label = c;
    for (std::size_t t = 0; t < clustering.labels.size(); ++t) {
        const int label = clustering.labels[t];
        if (label == kNoise) {
            schema.unclustered.push_back(index.table_id(static_cast<std::uint32_t>(t)));
        } else {
            schema.entity_types[label].tables.push_back(index.table_id(static_cast<std::uint32_t>(t)));
        }
    }

    for (const RelationshipGroup& g : inference.groups) {
        if (g.parent_cluster < 0 || g.parent_cluster >= clusters || g.child_cluster < 0 ||
            g.child_cluster >= clusters) {
            throw FatalError("relationship group references a cluster that does not exist");
        }
        SchemaRelationship rel;
        rel.parent_cluster = g.parent_cluster;
        rel.child_cluster = g.child_cluster;
        for (const ForeignKeyEdge& fk : g.members) {
            rel.foreign_keys.push_back(fk_identifier(index, fk));
        }
        schema.relationships.push_back(std::move(rel));
    }
    for (const ForeignKeyEdge& fk : inference.noise_edges) {
        schema.ungrouped_foreign_keys.push_back(fk_identifier(index, fk));
    }
    return schema;
}

std::string schema_to_json(const ConceptualSchema& schema) {
    nlohmann::json j;

    nlohmann::json clustering;
    clustering["params"] = {{"eps", schema.eps},
                            {"min_points", schema.min_points},
                            {"silhouette", schema.silhouette}};
    std::vector<std::vector<std::string>> clusters;
    for (const auto& et : schema.entity_types) clusters.push_back(et.tables);
    clustering["clusters"] = clusters;
    clustering["noise"] = schema.unclustered;
    j["clustering"] = clustering;

    j["entity_types"] = nlohmann::json::array();
    for (const auto& et : schema.entity_types) {
        j["entity_types"].push_back({{"label", et.label}, {"tables", et.tables}});
    }
    j["relationships"] = nlohmann::json::array();
    for (const auto& rel : schema.relationships) {
        j["relationships"].push_back({{"parent_cluster", rel.parent_cluster},
                                      {"child_cluster", rel.child_cluster},
                                      {"foreign_keys", rel.foreign_keys}});
    }
    j["unclustered"] = schema.unclustered;
    j["ungrouped_foreign_keys"] = schema.ungrouped_foreign_keys;
    return j.dump(2) + "\n";
}

std::string schema_to_dot(const ConceptualSchema& schema) {
    std::ostringstream os;
    os << "digraph conceptual_schema {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box];\n";
    for (const auto& et : schema.entity_types) {
        os << "  et" << et.label << " [label=\"entity_type_" << et.label << "\\n"
           << et.tables.size() << (et.tables.size() == 1 ? " table" : " tables") << "\"];\n";
    }
    for (const auto& rel : schema.relationships) {
        os << "  et" << rel.child_cluster << " -> et" << rel.parent_cluster << " [label=\""
           << rel.foreign_keys.size() << (rel.foreign_keys.size() == 1 ? " fk" : " fks")
           << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::vector<std::string> SchemaDigest::table_ids() const {
    std::vector<std::string> ids;
    for (const auto& et : entity_tables) ids.insert(ids.end(), et.begin(), et.end());
    ids.insert(ids.end(), unclustered.begin(), unclustered.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

SchemaDigest parse_schema_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FatalError(std::string("invalid schema JSON: ") + e.what());
    }
    SchemaDigest digest;
    try {
        for (const auto& et : j.at("entity_types")) {
            digest.entity_tables.push_back(et.at("tables").get<std::vector<std::string>>());
        }
        for (const auto& rel : j.at("relationships")) {
            digest.relationship_fks.push_back(
                rel.at("foreign_keys").get<std::vector<std::string>>());
        }
        digest.unclustered = j.at("unclustered").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw FatalError(std::string("schema JSON missing fields: ") + e.what());
    }
    return digest;
}

} // namespace lakeschema
