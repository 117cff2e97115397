#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lakeschema/features.hpp"
#include "lakeschema/ingest.hpp"

namespace lakeschema {

struct IndexConfig {
    std::uint64_t seed = 42;
    std::uint32_t num_hashes = 128;
    std::uint32_t num_trees = 8;       ///< prefix trees; prefix length = num_hashes / num_trees
    std::size_t candidate_factor = 2;  ///< column probes per table-lookup gather: top-(factor*k)
    std::array<double, kFamilyCount> family_weights{1.0, 1.0, 1.0, 1.0, 1.0};
    FeatureConfig features;

    void validate() const; ///< throws FatalError on nonsense parameters
};

struct ColumnRef {
    std::uint32_t table = 0;
    std::uint32_t column = 0;
    friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

struct ColumnNeighbour {
    ColumnRef column;
    double similarity = 0.0; ///< estimate in [0,1]
};

struct TableNeighbour {
    std::uint32_t table = 0;
    double distance = 1.0; ///< in [0,1]
};

/// One feature family's approximate index: per-column signatures (MinHash
/// for token sets, sign-of-random-projection bits for vectors) organized as
/// prefix-sorted trees for top-k lookups. Immutable once built.
class LshForestIndex {
public:
    LshForestIndex() = default;

    FeatureFamily family() const { return family_; }
    bool jaccard() const { return jaccard_; }
    std::size_t size() const { return columns_.size(); }
    bool empty() const { return columns_.empty(); }
    const std::vector<ColumnRef>& columns() const { return columns_; }
    std::uint32_t num_hashes() const { return num_hashes_; }

    bool contains(ColumnRef ref) const { return position(ref) >= 0; }

    /// Signature view of one indexed column (num_hashes values).
    const std::uint64_t* signature(ColumnRef ref) const;

    /// Similarity estimate from signature agreement; 0 when either column
    /// is absent from this family.
    double similarity(ColumnRef a, ColumnRef b) const;

    /// Top-k neighbours of `ref` (self excluded), descending by estimate.
    /// Empty when `ref` is not indexed in this family.
    std::vector<ColumnNeighbour> query(ColumnRef ref, std::size_t k) const;

private:
    friend class LakeIndex;

    long position(ColumnRef ref) const;
    double agreement(std::size_t pos_a, std::size_t pos_b) const;
    double similarity_from_agreement(double f) const;
    void build_trees();
    std::vector<std::uint32_t> gather_candidates(std::size_t pos, std::size_t target) const;

    FeatureFamily family_ = FeatureFamily::Name;
    bool jaccard_ = true;
    std::uint32_t num_hashes_ = 0;
    std::uint32_t num_trees_ = 0;
    std::uint32_t prefix_len_ = 0;
    std::vector<ColumnRef> columns_;       ///< canonical (table, column) order
    std::vector<std::uint64_t> signatures_; ///< columns x num_hashes
    std::vector<std::vector<std::uint32_t>> trees_; ///< positions sorted by prefix
};

/// All family indexes for one lake plus the table metadata needed to map
/// ColumnRefs back to ids and names. Build once, query concurrently.
class LakeIndex {
public:
    struct TableMeta {
        std::string id;
        std::vector<std::string> column_names;
    };

    static LakeIndex build(const std::vector<Table>& tables,
                           const std::vector<std::vector<ColumnProfile>>& profiles,
                           const IndexConfig& cfg, int threads = 1,
                           const LakeConfig& lake_cfg = {});

    const std::vector<TableMeta>& tables() const { return tables_; }
    std::size_t table_count() const { return tables_.size(); }
    std::size_t column_count(std::uint32_t table) const {
        return tables_[table].column_names.size();
    }
    const std::string& table_id(std::uint32_t table) const { return tables_[table].id; }
    const std::string& column_name(ColumnRef ref) const {
        return tables_[ref.table].column_names[ref.column];
    }
    long table_index(const std::string& id) const;

    std::uint64_t seed() const { return seed_; }
    const LshForestIndex& family_index(FeatureFamily f) const {
        return families_[static_cast<std::size_t>(f)];
    }

    const std::array<double, kFamilyCount>& family_weights() const { return weights_; }
    void set_family_weights(const std::array<double, kFamilyCount>& w) { weights_ = w; }

    /// Weighted mean of per-family estimates over families where both
    /// columns are indexed; 0 when no family is shared.
    double column_similarity(ColumnRef a, ColumnRef b) const;

    /// Symmetrized best-match aggregation of column similarities, in [0,1].
    double table_distance(std::uint32_t t1, std::uint32_t t2) const;

    /// Top-k tables by aggregated distance, candidates gathered through
    /// column-level index probes. Never returns the query table.
    std::vector<TableNeighbour> query_table_neighbours(std::uint32_t t, std::size_t k) const;

    std::vector<ColumnNeighbour> query_column(FeatureFamily family, ColumnRef ref,
                                              std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static LakeIndex load(const std::filesystem::path& path);

private:
    std::uint64_t seed_ = 0;
    IndexConfig cfg_;
    std::array<double, kFamilyCount> weights_{1.0, 1.0, 1.0, 1.0, 1.0};
    std::vector<TableMeta> tables_;
    std::array<LshForestIndex, kFamilyCount> families_;
};

} // namespace lakeschema
