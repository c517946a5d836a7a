#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace agglearn {

// A cell is empty, a parsed number, or verbatim text.
struct EmptyCell {
    bool operator==(const EmptyCell&) const = default;
};
using Cell = std::variant<EmptyCell, double, std::string>;

inline bool is_empty(const Cell& c) { return std::holds_alternative<EmptyCell>(c); }
inline bool is_number(const Cell& c) { return std::holds_alternative<double>(c); }
inline bool is_text(const Cell& c) { return std::holds_alternative<std::string>(c); }
inline double as_number(const Cell& c) { return std::get<double>(c); }
inline const std::string& as_text(const Cell& c) { return std::get<std::string>(c); }

struct Column {
    std::string name;
    std::vector<Cell> cells;
    // True when at least one numeric cell carried a currency prefix ($ or the
    // euro sign). Consumed by the annotator; not round-tripped by save_table.
    bool currency_flag = false;

    bool operator==(const Column&) const = default;
};

/// Columnar view of one delimited file. Immutable after load; all columns
/// have the same length and trimmed column names are unique.
struct Table {
    std::string dataset_id;
    std::vector<Column> columns;

    std::size_t row_count() const { return columns.empty() ? 0 : columns.front().cells.size(); }
    std::vector<std::string> headers() const;
    bool has_column(std::string_view name) const;
    const Column& column(std::string_view name) const;  // throws if absent
};

struct ColumnKind {
    enum class Kind { numeric, textual, mixed, empty };
    Kind kind = Kind::empty;
    // numeric cells / non-empty cells; 0 for an all-empty column.
    double numeric_fraction = 0.0;
};

std::string_view to_string(ColumnKind::Kind k);

/// User-supplied designation of which columns act as measures and which as
/// categories for one dataset. Roles must not overlap.
struct RoleManifest {
    std::string dataset_id;
    std::vector<std::string> measure_columns;
    std::vector<std::string> category_columns;
};

/// One candidate aggregation context: a (category column, measure column) pair.
struct ContextPair {
    std::string category;
    std::string measure;

    bool operator==(const ContextPair&) const = default;
};

struct NumericParse {
    bool ok = false;
    double value = 0.0;
    bool currency = false;
};

// Accepts plain decimals with optional sign, optional thousands separators
// (strict groups of three) and at most one decimal point; a leading $ or
// euro sign is stripped and reported. No exponent notation.
NumericParse parse_numeric_cell(std::string_view trimmed);

/// Parse delimited text (first row = headers) into a Table.
Table parse_table(std::string_view text, std::string dataset_id, char delimiter = ',');

/// Load a delimited file; dataset_id defaults to the file name.
Table load_table(const std::filesystem::path& path, char delimiter = ',');

/// Write a Table back out as RFC-4180-style delimited text. Numbers are
/// rendered so that reloading reproduces the same cell values.
void save_table(const Table& table, const std::filesystem::path& path, char delimiter = ',');
std::string table_to_text(const Table& table, char delimiter = ',');

// Shortest decimal rendering of v that reparses to the same double and never
// uses exponent notation.
std::string format_number(double v);

ColumnKind classify_column(const std::vector<Cell>& cells);

RoleManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const RoleManifest& manifest, const std::filesystem::path& path);

/// Validate a manifest against a table and enumerate its (category, measure)
/// context pairs, categories outermost.
std::vector<ContextPair> bind_roles(const Table& table, const RoleManifest& manifest);

std::string trim(std::string_view s);

}  // namespace agglearn
