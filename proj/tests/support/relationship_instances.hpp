#pragma once

// Random (clusters, matches, foreign keys) instances plus the group-join
// predicate, shared by the unit tests and the acceptance suite.

#include <random>
#include <set>

#include "lakeschema/relate.hpp"
#include "support/generators.hpp"

namespace testsupport {

struct RelationshipInstance {
    lakeschema::Clustering clustering;
    lakeschema::MatchSet matches;
    std::vector<lakeschema::ForeignKeyEdge> fks;
};

inline RelationshipInstance random_relationship_instance(std::mt19937& rng) {
    using lakeschema::ColumnRef;
    RelationshipInstance inst;
    const std::size_t n_tables = std::uniform_int_distribution<std::size_t>(3, 12)(rng);
    const int n_clusters = std::uniform_int_distribution<int>(1, 4)(rng);
    inst.clustering.labels = gen::random_labels(rng, n_tables, n_clusters, 0.2);
    inst.clustering.eps = 0.5;
    inst.clustering.min_points = 2;

    std::vector<std::size_t> cols(n_tables);
    for (auto& c : cols) c = std::uniform_int_distribution<std::size_t>(1, 4)(rng);

    auto random_column = [&]() {
        std::uint32_t t = std::uniform_int_distribution<std::uint32_t>(
            0, static_cast<std::uint32_t>(n_tables - 1))(rng);
        std::uint32_t c = std::uniform_int_distribution<std::uint32_t>(
            0, static_cast<std::uint32_t>(cols[t] - 1))(rng);
        return ColumnRef{t, c};
    };

    const int n_matches = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int i = 0; i < n_matches; ++i) {
        ColumnRef a = random_column(), b = random_column();
        if (a.table != b.table) inst.matches.add(a, b, 0.8);
    }

    const int n_fks = std::uniform_int_distribution<int>(0, 25)(rng);
    std::set<std::pair<ColumnRef, ColumnRef>> seen;
    for (int i = 0; i < n_fks; ++i) {
        ColumnRef p = random_column(), c = random_column();
        if (p.table == c.table) continue;
        if (!seen.insert({p, c}).second) continue;
        inst.fks.push_back({p, c, 1.0});
    }
    return inst;
}

/// The line-11 style join condition: fk may enter g only if every member
/// agrees on parent match, child match, and the cluster pair.
inline bool group_accepts(const lakeschema::RelationshipGroup& g,
                          const lakeschema::ForeignKeyEdge& fk,
                          const lakeschema::MatchSet& matches,
                          const lakeschema::Clustering& clustering) {
    int pc = clustering.labels[fk.parent.table];
    int cc = clustering.labels[fk.child.table];
    for (const lakeschema::ForeignKeyEdge& member : g.members) {
        if (!matches.matches(fk.parent, member.parent)) return false;
        if (!matches.matches(fk.child, member.child)) return false;
        if (pc != g.parent_cluster || cc != g.child_cluster) return false;
    }
    return true;
}

} // namespace testsupport
