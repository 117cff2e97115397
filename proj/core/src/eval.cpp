#include "lakeschema/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lakeschema/util.hpp"
#include <nlohmann/json.hpp>

namespace lakeschema {

namespace {

std::uint64_t choose2(std::uint64_t n) {
    return n < 2 ? 0 : n * (n - 1) / 2;
}

std::unordered_map<std::string, std::size_t> membership(const Partition& partition,
                                                        const char* what) {
    std::unordered_map<std::string, std::size_t> m;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        for (const auto& el : partition[i]) {
            if (!m.emplace(el, i).second) {
                throw FatalError(std::string(what) + " sets overlap on \"" + el + "\"");
            }
        }
    }
    return m;
}

// a,b,c,d from the contingency table between two partitions of the same
// element set (the all-pairs oracle in the tests counts pairs literally).
PairCounts pair_counts(const std::unordered_map<std::string, std::size_t>& x,
                       const std::unordered_map<std::string, std::size_t>& y,
                       std::size_t x_sets, std::size_t y_sets) {
    std::vector<std::uint64_t> x_sizes(x_sets, 0), y_sizes(y_sets, 0);
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cells;
    for (const auto& [el, xi] : x) {
        std::size_t yi = y.at(el);
        ++x_sizes[xi];
        ++y_sizes[yi];
        ++cells[{xi, yi}];
    }

    std::uint64_t same_x = 0, same_y = 0, same_both = 0;
    for (auto s : x_sizes) same_x += choose2(s);
    for (auto s : y_sizes) same_y += choose2(s);
    for (const auto& [cell, count] : cells) same_both += choose2(count);

    PairCounts pc;
    const std::uint64_t total = choose2(static_cast<std::uint64_t>(x.size()));
    pc.a = same_both;
    pc.c = same_x - same_both;
    pc.d = same_y - same_both;
    pc.b = total - pc.a - pc.c - pc.d;
    return pc;
}

} // namespace

RandResult rand_score(const Partition& computed, const Partition& ground_truth) {
    auto x = membership(computed, "computed cluster");
    auto y = membership(ground_truth, "ground-truth cluster");

    for (const auto& [el, _] : x) {
        if (!y.count(el)) {
            throw FatalError("element \"" + el + "\" missing from the ground-truth partition");
        }
    }
    for (const auto& [el, _] : y) {
        if (!x.count(el)) {
            throw FatalError("element \"" + el + "\" missing from the computed partition");
        }
    }

    RandResult r;
    if (x.size() < 2) {
        r.score = 1.0; // no pairs to disagree on
        return r;
    }
    r.counts = pair_counts(x, y, computed.size(), ground_truth.size());
    const std::uint64_t denom = r.counts.a + r.counts.b + r.counts.c + r.counts.d;
    r.score = static_cast<double>(r.counts.a + r.counts.b) / static_cast<double>(denom);
    return r;
}

RelationshipRandResult relationship_rand_score(const Partition& computed,
                                               const Partition& ground_truth) {
    auto x = membership(computed, "computed relationship");
    auto y = membership(ground_truth, "ground-truth relationship");

    std::unordered_map<std::string, std::size_t> shared_x, shared_y;
    std::uint64_t only = 0;
    for (const auto& [el, xi] : x) {
        auto it = y.find(el);
        if (it == y.end()) {
            ++only; // false positive
        } else {
            shared_x.emplace(el, xi);
            shared_y.emplace(el, it->second);
        }
    }
    for (const auto& [el, _] : y) {
        if (!x.count(el)) ++only; // false negative
    }

    RelationshipRandResult r;
    r.e = only;
    if (shared_x.size() >= 2) {
        r.counts = pair_counts(shared_x, shared_y, computed.size(), ground_truth.size());
    }
    const std::uint64_t denom = r.counts.a + r.counts.b + r.counts.c + r.counts.d + r.e;
    r.score = denom == 0 ? 1.0
                         : static_cast<double>(r.counts.a + r.counts.b) / static_cast<double>(denom);
    return r;
}

Partition partition_from_schema(const SchemaDigest& schema) {
    Partition p;
    for (const auto& tables : schema.entity_tables) {
        p.emplace_back(tables.begin(), tables.end());
    }
    for (const auto& id : schema.unclustered) {
        p.push_back({id}); // noise becomes a singleton cluster
    }
    return p;
}

Partition relationships_from_schema(const SchemaDigest& schema) {
    Partition p;
    for (const auto& fks : schema.relationship_fks) {
        p.emplace_back(fks.begin(), fks.end());
    }
    return p;
}

EvalReport evaluate_schema(const SchemaDigest& schema, const GroundTruth& gt) {
    EvalReport report;
    report.tables = schema.table_ids().size();
    report.clusters = schema.entity_tables.size();
    report.gt_clusters = gt.clusters.size();
    report.cluster_rand = rand_score(partition_from_schema(schema), gt.clusters);

    if (gt.relationships) {
        Partition computed = relationships_from_schema(schema);
        if (!computed.empty() || !gt.relationships->empty()) {
            report.relationship_rand = relationship_rand_score(computed, *gt.relationships);
        }
    }
    return report;
}

namespace {

// fk identifiers look like "parent_table.attr->child_table.attr"; attrs may
// not contain '.', table ids may.
void validate_fk_identifier(const std::string& id,
                            const std::unordered_set<std::string>& known) {
    auto arrow = id.find("->");
    if (arrow == std::string::npos) {
        throw FatalError("malformed foreign-key identifier \"" + id + "\" (missing ->)");
    }
    for (const std::string& endpoint : {id.substr(0, arrow), id.substr(arrow + 2)}) {
        auto dot = endpoint.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == endpoint.size()) {
            throw FatalError("malformed foreign-key endpoint \"" + endpoint + "\"");
        }
        std::string table = endpoint.substr(0, dot);
        if (!known.count(table)) {
            throw FatalError("ground truth references unknown table \"" + table + "\"");
        }
    }
}

} // namespace

GroundTruth load_ground_truth(const std::filesystem::path& path,
                              const std::vector<std::string>& known_table_ids) {
    std::ifstream in(path);
    if (!in) throw FatalError("cannot open ground truth: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FatalError(std::string("invalid ground-truth JSON: ") + e.what());
    }

    std::unordered_set<std::string> known(known_table_ids.begin(), known_table_ids.end());
    GroundTruth gt;

    if (!j.contains("clusters") || !j["clusters"].is_array()) {
        throw FatalError("ground truth must contain a \"clusters\" array");
    }
    std::unordered_set<std::string> seen;
    for (const auto& cluster : j["clusters"]) {
        std::set<std::string> set;
        for (const auto& id : cluster) {
            std::string table = id.get<std::string>();
            if (!known.count(table)) {
                throw FatalError("ground truth references unknown table \"" + table + "\"");
            }
            if (!seen.insert(table).second) {
                throw FatalError("ground-truth clusters overlap on \"" + table + "\"");
            }
            set.insert(std::move(table));
        }
        if (!set.empty()) gt.clusters.push_back(std::move(set));
    }

    if (j.contains("relationships")) {
        if (!j["relationships"].is_array()) {
            throw FatalError("ground-truth \"relationships\" must be an array");
        }
        Partition groups;
        std::unordered_set<std::string> seen_fk;
        for (const auto& group : j["relationships"]) {
            std::set<std::string> set;
            for (const auto& id : group) {
                std::string fk = id.get<std::string>();
                validate_fk_identifier(fk, known);
                if (!seen_fk.insert(fk).second) {
                    throw FatalError("duplicate ground-truth foreign key \"" + fk + "\"");
                }
                set.insert(std::move(fk));
            }
            if (!set.empty()) groups.push_back(std::move(set));
        }
        gt.relationships = std::move(groups);
    }
    return gt;
}

} // namespace lakeschema
