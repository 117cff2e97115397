#include "lakeschema/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <unordered_set>

#include "lakeschema/util.hpp"

namespace lakeschema {

std::string_view family_name(FeatureFamily f) {
    switch (f) {
        case FeatureFamily::Name: return "name";
        case FeatureFamily::Value: return "value";
        case FeatureFamily::Format: return "format";
        case FeatureFamily::Distribution: return "distribution";
        case FeatureFamily::Embedding: return "embedding";
    }
    return "unknown";
}

std::optional<FeatureFamily> family_from_name(std::string_view name) {
    for (int i = 0; i < static_cast<int>(kFamilyCount); ++i) {
        auto f = static_cast<FeatureFamily>(i);
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

FeatureSet name_features(std::string_view attribute_name, bool synthesized, std::size_t q) {
    FeatureSet fs;
    fs.family = FeatureFamily::Name;
    if (synthesized) return fs; // synthesized names carry no semantics
    std::string name = casefold(trim(attribute_name));
    if (name.empty()) return fs;
    if (name.size() < q) {
        fs.tokens.insert(name);
        return fs;
    }
    for (std::size_t i = 0; i + q <= name.size(); ++i) {
        fs.tokens.insert(name.substr(i, q));
    }
    return fs;
}

namespace {

bool is_token_char(unsigned char c) {
    // Tokens are runs of alphanumerics; non-ASCII bytes are kept so UTF-8
    // words survive. Everything else (whitespace, punctuation) splits.
    return std::isalnum(c) || c >= 0x80;
}

} // namespace

FeatureSet value_features(const std::set<std::string>& distinct_values) {
    FeatureSet fs;
    fs.family = FeatureFamily::Value;
    for (const auto& cell : distinct_values) {
        std::string token;
        for (unsigned char c : cell) {
            if (is_token_char(c)) {
                token.push_back(c < 0x80 ? static_cast<char>(std::tolower(c))
                                         : static_cast<char>(c));
            } else if (!token.empty()) {
                fs.tokens.insert(token);
                token.clear();
            }
        }
        if (!token.empty()) fs.tokens.insert(token);
    }
    return fs;
}

std::string format_pattern(std::string_view cell) {
    std::string pattern;
    std::size_t i = 0;
    while (i < cell.size()) {
        unsigned char c = static_cast<unsigned char>(cell[i]);
        char symbol;
        if (std::islower(c)) symbol = 'a';
        else if (std::isupper(c)) symbol = 'A';
        else if (std::isdigit(c)) symbol = 'd';
        else if (std::isspace(c)) symbol = 's';
        else symbol = static_cast<char>(c); // other chars kept literally

        auto same_class = [&](unsigned char x) {
            if (symbol == 'a') return std::islower(x) != 0;
            if (symbol == 'A') return std::isupper(x) != 0;
            if (symbol == 'd') return std::isdigit(x) != 0;
            if (symbol == 's') return std::isspace(x) != 0;
            return static_cast<char>(x) == symbol &&
                   !std::isalnum(x) && !std::isspace(x);
        };

        std::size_t run = 1;
        while (i + run < cell.size() && same_class(static_cast<unsigned char>(cell[i + run]))) {
            ++run;
        }
        pattern.push_back(symbol);
        if (run > 1) pattern.push_back('+');
        i += run;
    }
    return pattern;
}

FeatureSet format_features(const std::vector<std::string>& values, const LakeConfig& cfg) {
    FeatureSet fs;
    fs.family = FeatureFamily::Format;
    std::unordered_set<std::string> nulls;
    for (const auto& tok : cfg.null_tokens) nulls.insert(casefold(trim(tok)));
    for (const auto& cell : values) {
        std::string norm = normalize_cell(cell);
        if (norm.empty() || nulls.count(norm) > 0) continue;
        fs.tokens.insert(format_pattern(cell));
    }
    return fs;
}

FeatureSet distribution_signature(const std::vector<double>& numeric_values,
                                  std::size_t quantile_count) {
    FeatureSet fs;
    fs.family = FeatureFamily::Distribution;
    if (numeric_values.size() < 2 || quantile_count == 0) return fs;

    std::vector<double> sorted(numeric_values);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) return fs; // no spread

    // Quantiles at p = j/Q for j = 1..Q, linear interpolation.
    fs.vec.resize(quantile_count);
    const std::size_t n = sorted.size();
    for (std::size_t j = 1; j <= quantile_count; ++j) {
        double p = static_cast<double>(j) / static_cast<double>(quantile_count);
        double h = p * static_cast<double>(n - 1);
        std::size_t lo = static_cast<std::size_t>(h);
        double frac = h - static_cast<double>(lo);
        double v = sorted[lo];
        if (lo + 1 < n) v += frac * (sorted[lo + 1] - sorted[lo]);
        fs.vec[j - 1] = v;
    }

    double mean = 0.0;
    for (double v : fs.vec) mean += v;
    mean /= static_cast<double>(quantile_count);
    double var = 0.0;
    for (double v : fs.vec) var += (v - mean) * (v - mean);
    var /= static_cast<double>(quantile_count);
    double sd = std::sqrt(var);
    for (double& v : fs.vec) {
        v = sd == 0.0 ? 0.0 : (v - mean) / sd;
    }
    return fs;
}

namespace {
std::mutex g_extractor_mutex;
std::optional<EmbeddingExtractor> g_embedding_extractor;
} // namespace

void register_embedding_extractor(EmbeddingExtractor extractor) {
    std::lock_guard<std::mutex> lock(g_extractor_mutex);
    g_embedding_extractor = std::move(extractor);
}

void clear_embedding_extractor() {
    std::lock_guard<std::mutex> lock(g_extractor_mutex);
    g_embedding_extractor.reset();
}

const EmbeddingExtractor* embedding_extractor() {
    std::lock_guard<std::mutex> lock(g_extractor_mutex);
    return g_embedding_extractor ? &*g_embedding_extractor : nullptr;
}

ColumnFeatures extract_features(const Column& column, const ColumnProfile& profile,
                                const LakeConfig& lake_cfg, const FeatureConfig& cfg) {
    ColumnFeatures out;
    auto keep = [&](FeatureSet fs) {
        if (fs.indexable()) out[static_cast<std::size_t>(fs.family)] = std::move(fs);
    };
    keep(name_features(column.name, column.synthesized_name, cfg.name_qgram));
    if (!profile.degenerate) {
        keep(value_features(profile.distinct_values));
        keep(format_features(column.values, lake_cfg));
    }
    if (profile.kind == ColumnKind::Numeric) {
        keep(distribution_signature(profile.numeric_values, cfg.quantile_count));
    }
    if (const EmbeddingExtractor* ext = embedding_extractor()) {
        if (auto fs = (*ext)(column, profile); fs && fs->indexable()) {
            fs->family = FeatureFamily::Embedding;
            out[static_cast<std::size_t>(FeatureFamily::Embedding)] = std::move(*fs);
        }
    }
    return out;
}

} // namespace lakeschema
