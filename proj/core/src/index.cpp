#include "lakeschema/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "lakeschema/hashing.hpp"
#include "lakeschema/util.hpp"

namespace lakeschema {

namespace {

constexpr std::uint64_t kMinHashSalt = 0x6d696e68u; // "minh"
constexpr std::uint64_t kProjectionSalt = 0x70726f6au; // "proj"

std::uint64_t family_seed(std::uint64_t seed, FeatureFamily family, std::uint64_t salt) {
    return splitmix64(seed ^ (salt + static_cast<std::uint64_t>(family) * 0x9e3779b97f4a7c15ULL));
}

/// 128 independent permutation approximations over a 64-bit token hash.
class MinHasher {
public:
    MinHasher(std::uint64_t seed, FeatureFamily family, std::uint32_t num_hashes) {
        SplitMix64 rng(family_seed(seed, family, kMinHashSalt));
        keys_.resize(num_hashes);
        for (auto& k : keys_) k = rng.next();
    }

    void signature(const std::set<std::string>& tokens, std::uint64_t* out) const {
        const std::size_t h = keys_.size();
        for (std::size_t i = 0; i < h; ++i) out[i] = std::numeric_limits<std::uint64_t>::max();
        for (const auto& tok : tokens) {
            const std::uint64_t base = fnv1a64(tok);
            for (std::size_t i = 0; i < h; ++i) {
                std::uint64_t v = splitmix64(base ^ keys_[i]);
                if (v < out[i]) out[i] = v;
            }
        }
    }

private:
    std::vector<std::uint64_t> keys_;
};

/// Sign-of-random-projection bits for fixed-length vectors.
class SignProjector {
public:
    SignProjector(std::uint64_t seed, FeatureFamily family, std::uint32_t num_hashes,
                  std::size_t dim)
        : dim_(dim) {
        SplitMix64 rng(family_seed(seed, family, kProjectionSalt));
        planes_.resize(static_cast<std::size_t>(num_hashes) * dim);
        for (auto& v : planes_) v = rng.gaussian();
    }

    void signature(const std::vector<double>& vec, std::uint64_t* out,
                   std::uint32_t num_hashes) const {
        for (std::uint32_t i = 0; i < num_hashes; ++i) {
            const double* plane = planes_.data() + static_cast<std::size_t>(i) * dim_;
            double dot = 0.0;
            for (std::size_t d = 0; d < dim_; ++d) dot += plane[d] * vec[d];
            out[i] = dot >= 0.0 ? 1u : 0u;
        }
    }

private:
    std::size_t dim_;
    std::vector<double> planes_;
};

} // namespace

void IndexConfig::validate() const {
    if (num_hashes == 0 || num_trees == 0) {
        throw FatalError("index config: num_hashes and num_trees must be positive");
    }
    if (num_hashes % num_trees != 0) {
        throw FatalError("index config: num_hashes must be a multiple of num_trees");
    }
    if (features.name_qgram < 2) {
        throw FatalError("index config: name q-gram length must be >= 2");
    }
    if (features.quantile_count < 2) {
        throw FatalError("index config: quantile count must be >= 2");
    }
}

long LshForestIndex::position(ColumnRef ref) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), ref);
    if (it == columns_.end() || *it != ref) return -1;
    return it - columns_.begin();
}

const std::uint64_t* LshForestIndex::signature(ColumnRef ref) const {
    long pos = position(ref);
    if (pos < 0) return nullptr;
    return signatures_.data() + static_cast<std::size_t>(pos) * num_hashes_;
}

double LshForestIndex::agreement(std::size_t pos_a, std::size_t pos_b) const {
    const std::uint64_t* a = signatures_.data() + pos_a * num_hashes_;
    const std::uint64_t* b = signatures_.data() + pos_b * num_hashes_;
    std::uint32_t same = 0;
    for (std::uint32_t i = 0; i < num_hashes_; ++i) same += a[i] == b[i];
    return static_cast<double>(same) / static_cast<double>(num_hashes_);
}

double LshForestIndex::similarity_from_agreement(double f) const {
    if (jaccard_) return f; // MinHash collision rate estimates Jaccard directly
    // Bit agreement estimates the angle; map cosine into [0,1].
    double angle = std::numbers::pi * (1.0 - f);
    return (std::cos(angle) + 1.0) / 2.0;
}

double LshForestIndex::similarity(ColumnRef a, ColumnRef b) const {
    long pa = position(a);
    long pb = position(b);
    if (pa < 0 || pb < 0) return 0.0;
    return similarity_from_agreement(agreement(pa, pb));
}

void LshForestIndex::build_trees() {
    trees_.assign(num_trees_, {});
    for (std::uint32_t t = 0; t < num_trees_; ++t) {
        auto& order = trees_[t];
        order.resize(columns_.size());
        for (std::uint32_t i = 0; i < columns_.size(); ++i) order[i] = i;
        const std::size_t off = static_cast<std::size_t>(t) * prefix_len_;
        std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
            const std::uint64_t* sx = signatures_.data() + static_cast<std::size_t>(x) * num_hashes_ + off;
            const std::uint64_t* sy = signatures_.data() + static_cast<std::size_t>(y) * num_hashes_ + off;
            for (std::uint32_t i = 0; i < prefix_len_; ++i) {
                if (sx[i] != sy[i]) return sx[i] < sy[i];
            }
            return x < y;
        });
    }
}

std::vector<std::uint32_t> LshForestIndex::gather_candidates(std::size_t pos,
                                                             std::size_t target) const {
    // Per tree, the entries matching the query's first L prefix values form
    // a contiguous, nested range. Descend from the longest prefix and widen
    // until enough distinct candidates accumulate.
    const std::size_t n = columns_.size();
    std::vector<char> taken(n, 0);
    taken[pos] = 1; // exclude self
    std::vector<std::uint32_t> out;

    struct Range {
        std::size_t lo, hi;
    };
    std::vector<std::vector<Range>> ranges(num_trees_); // per tree, index = prefix length
    for (std::uint32_t t = 0; t < num_trees_; ++t) {
        const std::size_t off = static_cast<std::size_t>(t) * prefix_len_;
        const std::uint64_t* q = signatures_.data() + pos * num_hashes_ + off;
        auto& r = ranges[t];
        r.push_back({0, trees_[t].size()}); // L = 0: everything
        for (std::uint32_t len = 1; len <= prefix_len_; ++len) {
            const Range prev = r.back();
            if (prev.lo == prev.hi) {
                r.push_back(prev);
                continue;
            }
            const std::uint64_t want = q[len - 1];
            auto value_at = [&](std::size_t i) {
                return signatures_[static_cast<std::size_t>(trees_[t][i]) * num_hashes_ + off + len - 1];
            };
            std::size_t lo = prev.lo, hi = prev.hi;
            // lower_bound / upper_bound on the (len-1)-th prefix value
            std::size_t a = lo, b = hi;
            while (a < b) {
                std::size_t m = a + (b - a) / 2;
                if (value_at(m) < want) a = m + 1; else b = m;
            }
            std::size_t first = a;
            a = first; b = hi;
            while (a < b) {
                std::size_t m = a + (b - a) / 2;
                if (value_at(m) <= want) a = m + 1; else b = m;
            }
            r.push_back({first, a});
        }
    }

    for (std::uint32_t len = prefix_len_; out.size() < target;) {
        for (std::uint32_t t = 0; t < num_trees_; ++t) {
            const Range r = ranges[t][len];
            for (std::size_t i = r.lo; i < r.hi; ++i) {
                std::uint32_t cand = trees_[t][i];
                if (!taken[cand]) {
                    taken[cand] = 1;
                    out.push_back(cand);
                }
            }
        }
        if (len == 0) break;
        --len;
    }
    return out;
}

std::vector<ColumnNeighbour> LshForestIndex::query(ColumnRef ref, std::size_t k) const {
    long pos = position(ref);
    if (pos < 0 || k == 0) return {};
    const std::size_t target = std::max<std::size_t>(4 * k, 32);
    auto cands = gather_candidates(static_cast<std::size_t>(pos), target);

    std::vector<ColumnNeighbour> scored;
    scored.reserve(cands.size());
    for (std::uint32_t c : cands) {
        double sim = similarity_from_agreement(agreement(static_cast<std::size_t>(pos), c));
        scored.push_back({columns_[c], sim});
    }
    std::sort(scored.begin(), scored.end(), [](const ColumnNeighbour& a, const ColumnNeighbour& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.column < b.column;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

LakeIndex LakeIndex::build(const std::vector<Table>& tables,
                           const std::vector<std::vector<ColumnProfile>>& profiles,
                           const IndexConfig& cfg, int threads, const LakeConfig& lake_cfg) {
    cfg.validate();
    LakeIndex index;
    index.seed_ = cfg.seed;
    index.cfg_ = cfg;
    index.weights_ = cfg.family_weights;

    index.tables_.resize(tables.size());
    std::vector<ColumnRef> all_columns;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        index.tables_[t].id = tables[t].id;
        for (std::size_t c = 0; c < tables[t].columns.size(); ++c) {
            index.tables_[t].column_names.push_back(tables[t].columns[c].name);
            all_columns.push_back({static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c)});
        }
    }

    std::vector<ColumnFeatures> features(all_columns.size());
    parallel_for(all_columns.size(), threads, [&](std::size_t i) {
        ColumnRef ref = all_columns[i];
        features[i] = extract_features(tables[ref.table].columns[ref.column],
                                       profiles[ref.table][ref.column], lake_cfg, cfg.features);
    });

    std::size_t indexed_total = 0;
    for (std::size_t fi = 0; fi < kFamilyCount; ++fi) {
        const auto family = static_cast<FeatureFamily>(fi);
        LshForestIndex& fidx = index.families_[fi];
        fidx.family_ = family;
        fidx.num_hashes_ = cfg.num_hashes;
        fidx.num_trees_ = cfg.num_trees;
        fidx.prefix_len_ = cfg.num_hashes / cfg.num_trees;

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < all_columns.size(); ++i) {
            if (features[i][fi]) members.push_back(i);
        }
        if (members.empty()) {
            fidx.jaccard_ = family != FeatureFamily::Distribution;
            fidx.build_trees();
            continue;
        }

        const bool vector_family = features[members.front()][fi]->is_vector();
        for (std::size_t m : members) {
            if (features[m][fi]->is_vector() != vector_family) {
                throw FatalError("feature family " + std::string(family_name(family)) +
                                 " mixes token and vector features");
            }
        }
        fidx.jaccard_ = !vector_family;
        fidx.columns_.resize(members.size());
        for (std::size_t j = 0; j < members.size(); ++j) fidx.columns_[j] = all_columns[members[j]];
        fidx.signatures_.assign(members.size() * cfg.num_hashes, 0);

        if (vector_family) {
            const std::size_t dim = features[members.front()][fi]->vec.size();
            for (std::size_t m : members) {
                if (features[m][fi]->vec.size() != dim) {
                    throw FatalError("feature family " + std::string(family_name(family)) +
                                     " must use fixed-length vectors");
                }
            }
            SignProjector proj(cfg.seed, family, cfg.num_hashes, dim);
            parallel_for(members.size(), threads, [&](std::size_t j) {
                proj.signature(features[members[j]][fi]->vec,
                               fidx.signatures_.data() + j * cfg.num_hashes, cfg.num_hashes);
            });
        } else {
            MinHasher hasher(cfg.seed, family, cfg.num_hashes);
            parallel_for(members.size(), threads, [&](std::size_t j) {
                hasher.signature(features[members[j]][fi]->tokens,
                                 fidx.signatures_.data() + j * cfg.num_hashes);
            });
        }
        fidx.build_trees();
        indexed_total += members.size();
    }

    if (indexed_total == 0) {
        throw FatalError("no indexable columns in the lake");
    }
    return index;
}

long LakeIndex::table_index(const std::string& id) const {
    for (std::size_t t = 0; t < tables_.size(); ++t) {
        if (tables_[t].id == id) return static_cast<long>(t);
    }
    return -1;
}

double LakeIndex::column_similarity(ColumnRef a, ColumnRef b) const {
    double weighted = 0.0;
    double total_weight = 0.0;
    for (std::size_t fi = 0; fi < kFamilyCount; ++fi) {
        const double w = weights_[fi];
        if (w <= 0.0) continue;
        const LshForestIndex& idx = families_[fi];
        if (idx.empty()) continue;
        long pa = idx.position(a);
        if (pa < 0) continue;
        long pb = idx.position(b);
        if (pb < 0) continue;
        weighted += w * idx.similarity_from_agreement(
                            idx.agreement(static_cast<std::size_t>(pa), static_cast<std::size_t>(pb)));
        total_weight += w;
    }
    if (total_weight == 0.0) return 0.0;
    return weighted / total_weight;
}

double LakeIndex::table_distance(std::uint32_t t1, std::uint32_t t2) const {
    const std::size_t n1 = column_count(t1);
    const std::size_t n2 = column_count(t2);
    if (n1 == 0 || n2 == 0) return 1.0;

    // One pass over the column-pair similarities serves both directions.
    std::vector<double> best_from(n1, 0.0);
    std::vector<double> best_to(n2, 0.0);
    for (std::uint32_t c = 0; c < n1; ++c) {
        for (std::uint32_t d = 0; d < n2; ++d) {
            double sim = column_similarity({t1, c}, {t2, d});
            best_from[c] = std::max(best_from[c], sim);
            best_to[d] = std::max(best_to[d], sim);
        }
    }
    auto directional = [](const std::vector<double>& best) {
        double sumsq = 0.0;
        for (double b : best) {
            const double gap = 1.0 - std::min(b, 1.0);
            sumsq += gap * gap;
        }
        return std::sqrt(sumsq) / std::sqrt(static_cast<double>(best.size()));
    };
    return (directional(best_from) + directional(best_to)) / 2.0;
}

std::vector<TableNeighbour> LakeIndex::query_table_neighbours(std::uint32_t t, std::size_t k) const {
    if (k == 0) return {};
    const std::size_t probe_k = std::max<std::size_t>(1, cfg_.candidate_factor * k);
    std::set<std::uint32_t> candidates;
    for (std::size_t fi = 0; fi < kFamilyCount; ++fi) {
        const LshForestIndex& idx = families_[fi];
        if (idx.empty()) continue;
        for (std::uint32_t c = 0; c < column_count(t); ++c) {
            for (const auto& nbr : idx.query({t, c}, probe_k)) {
                if (nbr.column.table != t) candidates.insert(nbr.column.table);
            }
        }
    }

    std::vector<TableNeighbour> out;
    out.reserve(candidates.size());
    for (std::uint32_t cand : candidates) {
        out.push_back({cand, table_distance(t, cand)});
    }
    std::sort(out.begin(), out.end(), [](const TableNeighbour& a, const TableNeighbour& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.table < b.table;
    });
    if (out.size() > k) out.resize(k);
    return out;
}

std::vector<ColumnNeighbour> LakeIndex::query_column(FeatureFamily family, ColumnRef ref,
                                                     std::size_t k) const {
    return family_index(family).query(ref, k);
}

// ---------------------------------------------------------------------------
// Persistence: versioned little-endian binary artifact.

namespace {

constexpr char kMagic[8] = {'L', 'A', 'K', 'E', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

std::string get_str(std::istream& in) {
    std::uint32_t len = get_u32(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

} // namespace

void LakeIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FatalError("cannot write index artifact: " + path.string());

    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u64(out, seed_);
    put_u32(out, cfg_.num_hashes);
    put_u32(out, cfg_.num_trees);

    put_u32(out, static_cast<std::uint32_t>(tables_.size()));
    for (const auto& t : tables_) {
        put_str(out, t.id);
        put_u32(out, static_cast<std::uint32_t>(t.column_names.size()));
        for (const auto& name : t.column_names) put_str(out, name);
    }

    put_u32(out, static_cast<std::uint32_t>(kFamilyCount));
    for (const auto& fidx : families_) {
        out.put(static_cast<char>(fidx.family_));
        out.put(fidx.jaccard_ ? 1 : 0);
        put_u64(out, fidx.columns_.size());
        for (std::size_t j = 0; j < fidx.columns_.size(); ++j) {
            put_u32(out, fidx.columns_[j].table);
            put_u32(out, fidx.columns_[j].column);
            const std::uint64_t* sig = fidx.signatures_.data() + j * fidx.num_hashes_;
            for (std::uint32_t i = 0; i < fidx.num_hashes_; ++i) put_u64(out, sig[i]);
        }
    }
    if (!out) throw FatalError("failed writing index artifact: " + path.string());
}

LakeIndex LakeIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FatalError("cannot open index artifact: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FatalError("not an index artifact: " + path.string());
    }
    std::uint32_t version = get_u32(in);
    if (version != kVersion) {
        throw FatalError("unsupported index artifact version " + std::to_string(version));
    }

    LakeIndex index;
    index.seed_ = get_u64(in);
    index.cfg_.seed = index.seed_;
    index.cfg_.num_hashes = get_u32(in);
    index.cfg_.num_trees = get_u32(in);
    index.cfg_.validate();

    std::uint32_t table_count = get_u32(in);
    index.tables_.resize(table_count);
    for (auto& t : index.tables_) {
        t.id = get_str(in);
        std::uint32_t cols = get_u32(in);
        t.column_names.resize(cols);
        for (auto& name : t.column_names) name = get_str(in);
    }

    std::uint32_t family_count = get_u32(in);
    if (family_count != kFamilyCount) {
        throw FatalError("index artifact family count mismatch");
    }
    for (std::uint32_t fi = 0; fi < family_count; ++fi) {
        LshForestIndex& fidx = index.families_[fi];
        int fam = in.get();
        int jac = in.get();
        if (fam != static_cast<int>(fi)) throw FatalError("index artifact family order mismatch");
        fidx.family_ = static_cast<FeatureFamily>(fam);
        fidx.jaccard_ = jac != 0;
        fidx.num_hashes_ = index.cfg_.num_hashes;
        fidx.num_trees_ = index.cfg_.num_trees;
        fidx.prefix_len_ = fidx.num_hashes_ / fidx.num_trees_;
        std::uint64_t cols = get_u64(in);
        fidx.columns_.resize(cols);
        fidx.signatures_.assign(cols * fidx.num_hashes_, 0);
        for (std::uint64_t j = 0; j < cols; ++j) {
            fidx.columns_[j].table = get_u32(in);
            fidx.columns_[j].column = get_u32(in);
            for (std::uint32_t i = 0; i < fidx.num_hashes_; ++i) {
                fidx.signatures_[j * fidx.num_hashes_ + i] = get_u64(in);
            }
        }
        fidx.build_trees();
    }
    if (!in) throw FatalError("truncated index artifact: " + path.string());
    return index;
}

} // namespace lakeschema
