#include "lakeschema/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "lakeschema/util.hpp"

namespace lakeschema {

bool LakeConfig::is_null(std::string_view normalized_cell) const {
    if (normalized_cell.empty()) return true;
    for (const auto& tok : null_tokens) {
        if (casefold(tok) == normalized_cell) return true;
    }
    return false;
}

namespace {

// Splits one logical CSV record. Supports RFC-4180 style quoting: quoted
// fields may contain the delimiter, doubled quotes, and newlines (the caller
// hands us the full logical record).
std::vector<std::string> split_record(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            in_quotes = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

// Reads logical records, joining physical lines while inside a quoted field.
std::vector<std::vector<std::string>> read_records(std::istream& in, char delimiter,
                                                   std::string& error) {
    std::vector<std::vector<std::string>> records;
    std::string line;
    std::string record;
    bool pending = false;
    auto quote_open = [](const std::string& s) {
        bool open = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') open = !open;
        }
        return open;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pending) {
            record += "\n" + line;
        } else {
            record = line;
        }
        pending = quote_open(record);
        if (pending) continue;
        if (record.empty()) continue; // blank line
        records.push_back(split_record(record, delimiter));
    }
    if (pending) {
        error = "unterminated quoted field";
        return {};
    }
    return records;
}

bool parse_file(const std::filesystem::path& path, const LakeConfig& cfg, Table& out,
                std::string& error) {
    std::ifstream in(path);
    if (!in) {
        error = "cannot open file";
        return false;
    }
    auto records = read_records(in, cfg.delimiter, error);
    if (!error.empty()) return false;
    if (records.empty()) {
        error = "empty file";
        return false;
    }

    std::size_t width = records.front().size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width) {
            std::ostringstream os;
            os << "ragged row " << (r + 1) << ": expected " << width << " fields, got "
               << records[r].size();
            error = os.str();
            return false;
        }
    }

    std::vector<std::string> headers(width);
    std::size_t data_start = 0;
    if (cfg.header) {
        for (std::size_t c = 0; c < width; ++c) headers[c] = trim(records[0][c]);
        data_start = 1;
    }

    out.id = path.stem().string();
    out.name = path.filename().string();
    out.columns.resize(width);
    for (std::size_t c = 0; c < width; ++c) {
        Column& col = out.columns[c];
        col.table_id = out.id;
        col.ordinal = c;
        if (headers[c].empty()) {
            col.name = "col_" + std::to_string(c);
            col.synthesized_name = true;
        } else {
            col.name = headers[c];
        }
        col.values.reserve(records.size() - data_start);
        for (std::size_t r = data_start; r < records.size(); ++r) {
            col.values.push_back(records[r][c]);
        }
    }
    if (out.columns.empty()) {
        error = "no columns";
        return false;
    }
    return true;
}

bool is_lake_file(const std::filesystem::path& p) {
    auto ext = casefold(p.extension().string());
    return ext == ".csv" || ext == ".tsv" || ext == ".txt" || ext == ".psv";
}

} // namespace

LoadResult load_lake(const std::filesystem::path& dir, const LakeConfig& cfg) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir) || !fs::is_directory(dir)) {
        throw FatalError("input directory not found: " + dir.string());
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_lake_file(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    for (const auto& path : files) {
        Table table;
        std::string error;
        if (!parse_file(path, cfg, table, error)) {
            result.skipped.push_back({path.filename().string(), error});
            std::cerr << "[skip] " << path.filename().string() << ": " << error << "\n";
            continue;
        }
        if (!seen_ids.insert(table.id).second) {
            result.skipped.push_back({path.filename().string(), "duplicate table id " + table.id});
            std::cerr << "[skip] " << path.filename().string() << ": duplicate table id\n";
            continue;
        }
        result.tables.push_back(std::move(table));
    }

    if (result.tables.empty()) {
        throw FatalError("no tables found in " + dir.string());
    }
    std::sort(result.tables.begin(), result.tables.end(),
              [](const Table& a, const Table& b) { return a.id < b.id; });
    return result;
}

ColumnProfile profile_column(const Column& column, const LakeConfig& cfg) {
    ColumnProfile p;
    p.row_count = column.values.size();

    std::unordered_set<std::string> nulls;
    for (const auto& tok : cfg.null_tokens) nulls.insert(casefold(trim(tok)));

    std::size_t numeric_count = 0;
    std::vector<double> parsed;
    for (const auto& raw : column.values) {
        std::string norm = normalize_cell(raw);
        if (norm.empty() || nulls.count(norm) > 0) continue;
        ++p.non_null_count;
        p.distinct_values.insert(norm);
        double v;
        if (parse_number(norm, v)) {
            ++numeric_count;
            parsed.push_back(v);
        }
    }

    const std::size_t null_count = p.row_count - p.non_null_count;
    p.null_ratio = p.row_count == 0 ? 0.0 : static_cast<double>(null_count) / p.row_count;
    p.distinct_ratio = static_cast<double>(p.distinct_values.size()) /
                       static_cast<double>(std::max<std::size_t>(1, p.non_null_count));

    if (p.non_null_count == 0) {
        p.degenerate = true;
        p.kind = ColumnKind::Textual;
        return p;
    }
    // Numeric when >= 90% of non-null cells parse; tolerates stray units and
    // typos in heterogeneous web tables.
    if (10 * numeric_count >= 9 * p.non_null_count) {
        p.kind = ColumnKind::Numeric;
        p.numeric_values = std::move(parsed);
    }
    return p;
}

std::vector<std::vector<ColumnProfile>> profile_tables(const std::vector<Table>& tables,
                                                       const LakeConfig& cfg, int threads) {
    std::vector<std::vector<ColumnProfile>> profiles(tables.size());
    parallel_for(tables.size(), threads, [&](std::size_t t) {
        const Table& table = tables[t];
        profiles[t].resize(table.columns.size());
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            profiles[t][c] = profile_column(table.columns[c], cfg);
        }
    });
    return profiles;
}

} // namespace lakeschema
