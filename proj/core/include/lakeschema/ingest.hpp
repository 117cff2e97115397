#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace lakeschema {

/// Parsing options for a lake of delimited text files.
struct LakeConfig {
    char delimiter = ',';
    bool header = true;
    /// Cell values (after trim + case-fold) treated as null, in addition to
    /// the empty string.
    std::vector<std::string> null_tokens = {"null", "na", "n/a"};

    bool is_null(std::string_view normalized_cell) const;
};

struct Column {
    std::string table_id;
    std::string name;            ///< header string; "col_<ordinal>" when missing
    bool synthesized_name = false;
    std::size_t ordinal = 0;
    std::vector<std::string> values; ///< raw cells; empty string = null
};

struct Table {
    std::string id;   ///< file stem, unique within the lake
    std::string name; ///< display string (file name)
    std::vector<Column> columns;

    std::size_t row_count() const { return columns.empty() ? 0 : columns.front().values.size(); }
};

enum class ColumnKind { Textual, Numeric };

struct ColumnProfile {
    ColumnKind kind = ColumnKind::Textual;
    std::size_t row_count = 0;
    std::size_t non_null_count = 0;
    double null_ratio = 0.0;
    double distinct_ratio = 0.0;     ///< distinct non-null / non-null
    bool degenerate = false;         ///< no usable (non-null) values
    std::set<std::string> distinct_values; ///< normalized non-null cells
    std::vector<double> numeric_values;    ///< parsed values, numeric columns only
};

struct SkipReport {
    std::string file;
    std::string reason;
};

struct LoadResult {
    std::vector<Table> tables;        ///< sorted by id
    std::vector<SkipReport> skipped;
};

/// Loads every parseable delimited file in `dir`. Unparseable files are
/// reported on stderr and in the result, not fatal. Throws FatalError when
/// the directory is missing or no file parses.
LoadResult load_lake(const std::filesystem::path& dir, const LakeConfig& cfg);

ColumnProfile profile_column(const Column& column, const LakeConfig& cfg);

/// Profiles every column of every table; result is aligned with the input
/// (profiles[t][c] describes tables[t].columns[c]).
std::vector<std::vector<ColumnProfile>> profile_tables(const std::vector<Table>& tables,
                                                       const LakeConfig& cfg, int threads = 1);

} // namespace lakeschema
