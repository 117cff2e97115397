#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lakeschema/ingest.hpp"

namespace lakeschema {

enum class FeatureFamily : int { Name = 0, Value = 1, Format = 2, Distribution = 3, Embedding = 4 };

inline constexpr std::size_t kFamilyCount = 5;

std::string_view family_name(FeatureFamily f);
std::optional<FeatureFamily> family_from_name(std::string_view name);

/// What the LSH index hashes for one column in one family. Set families
/// (Name/Value/Format) carry tokens; Distribution (and Embedding, when an
/// extractor is registered) carry a fixed-length real vector.
struct FeatureSet {
    FeatureFamily family = FeatureFamily::Name;
    std::set<std::string> tokens;
    std::vector<double> vec;

    bool is_vector() const { return !vec.empty(); }
    bool indexable() const { return !tokens.empty() || !vec.empty(); }
};

struct FeatureConfig {
    std::size_t name_qgram = 3;        ///< q for attribute-name q-grams
    std::size_t quantile_count = 10;   ///< entries in a distribution signature
};

/// q-grams of a case-folded attribute name. Names shorter than q yield the
/// whole name; synthesized names yield the empty (non-indexable) set.
FeatureSet name_features(std::string_view attribute_name, bool synthesized, std::size_t q = 3);

/// Distinct case-folded tokens of the non-null cells, split on whitespace
/// and punctuation. The input is the profiled distinct-value set, which
/// already holds every non-null normalized cell.
FeatureSet value_features(const std::set<std::string>& distinct_values);

/// Distinct character-class patterns of the non-null cells: lowercase -> a,
/// uppercase -> A, digit -> d, whitespace -> s, anything else kept
/// literally; runs longer than one collapse to "<symbol>+".
FeatureSet format_features(const std::vector<std::string>& values, const LakeConfig& cfg);

std::string format_pattern(std::string_view cell);

/// Evenly spaced quantiles (linear interpolation) of the parsed values,
/// standardized to mean 0 / unit stddev. Fewer than 2 distinct values ->
/// non-indexable empty set.
FeatureSet distribution_signature(const std::vector<double>& numeric_values,
                                  std::size_t quantile_count = 10);

/// Extension point for the Embedding family; no extractor is bundled.
/// A registered extractor may return nullopt for columns it cannot embed.
using EmbeddingExtractor =
    std::function<std::optional<FeatureSet>(const Column&, const ColumnProfile&)>;
void register_embedding_extractor(EmbeddingExtractor extractor);
void clear_embedding_extractor();
const EmbeddingExtractor* embedding_extractor();

/// Per-family features for one column; entries are nullopt when the family
/// does not apply or the column is non-indexable in it.
using ColumnFeatures = std::array<std::optional<FeatureSet>, kFamilyCount>;

ColumnFeatures extract_features(const Column& column, const ColumnProfile& profile,
                                const LakeConfig& lake_cfg, const FeatureConfig& cfg);

} // namespace lakeschema
