#include "agglearn/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace agglearn {

namespace {

constexpr std::string_view kEuroSign = "\xe2\x82\xac";

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Strips a $ or euro prefix at position `pos`; returns true when one was found.
bool strip_currency(std::string_view s, std::size_t& pos) {
    if (pos < s.size() && s[pos] == '$') {
        ++pos;
        return true;
    }
    if (s.substr(pos, kEuroSign.size()) == kEuroSign) {
        pos += kEuroSign.size();
        return true;
    }
    return false;
}

// Splits file content into rows of raw fields, honouring RFC-4180 quoting
// (embedded delimiters, doubled quotes, newlines inside quoted fields).
std::vector<std::vector<std::string>> split_delimited(std::string_view text, char delimiter) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;

    // UTF-8 BOM
    if (text.substr(0, 3) == "\xef\xbb\xbf") text.remove_prefix(3);

    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    while (i < n) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            row_started = true;
            ++i;
        } else if (c == delimiter) {
            end_field();
            row_started = true;
            ++i;
        } else if (c == '\n') {
            end_row();
            ++i;
        } else if (c == '\r') {
            if (i + 1 < n && text[i + 1] == '\n') i += 2;
            else ++i;
            end_row();
        } else {
            field += c;
            row_started = true;
            ++i;
        }
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted field at end of input");
    if (row_started || !row.empty() || !field.empty()) end_row();
    return rows;
}

Cell make_cell(const std::string& raw, bool& saw_currency) {
    if (raw.empty()) return EmptyCell{};
    NumericParse p = parse_numeric_cell(trim(raw));
    if (p.ok) {
        saw_currency = saw_currency || p.currency;
        return p.value;
    }
    return raw;
}

bool needs_quoting(const std::string& s, char delimiter) {
    return s.find(delimiter) != std::string::npos || s.find('"') != std::string::npos ||
           s.find('\n') != std::string::npos || s.find('\r') != std::string::npos;
}

void write_field(std::string& out, const std::string& s, char delimiter) {
    if (!needs_quoting(s, delimiter)) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

// Rewrites to_chars scientific output ("1.23e+07") as a plain decimal by
// shifting the point; the digit string is unchanged so the value reparses
// exactly.
std::string expand_scientific(std::string_view s) {
    auto e = s.find_first_of("eE");
    if (e == std::string_view::npos) return std::string(s);

    std::string sign;
    std::string_view mantissa = s.substr(0, e);
    if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
        if (mantissa.front() == '-') sign = "-";
        mantissa.remove_prefix(1);
    }
    int exp = std::atoi(std::string(s.substr(e + 1)).c_str());

    std::string digits;
    int point = static_cast<int>(mantissa.size());
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
        point = static_cast<int>(dot);
    } else {
        digits = std::string(mantissa);
    }
    point += exp;

    std::string out = sign;
    if (point <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-point), '0');
        out += digits;
    } else if (point >= static_cast<int>(digits.size())) {
        out += digits;
        out.append(static_cast<std::size_t>(point) - digits.size(), '0');
    } else {
        out += digits.substr(0, static_cast<std::size_t>(point));
        out += '.';
        out += digits.substr(static_cast<std::size_t>(point));
    }
    return out;
}

}  // namespace

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

NumericParse parse_numeric_cell(std::string_view s) {
    NumericParse out;
    if (s.empty()) return out;

    std::size_t i = 0;
    bool currency = strip_currency(s, i);
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        negative = s[i] == '-';
        ++i;
        if (!currency) currency = strip_currency(s, i);
    }

    // Integer part: plain digits, or strict comma groups of three.
    std::string digits;
    std::size_t start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    digits.assign(s.substr(start, i - start));
    if (!digits.empty() && digits.size() <= 3 && i < s.size() && s[i] == ',') {
        std::string grouped = digits;
        std::size_t j = i;
        while (j < s.size() && s[j] == ',') {
            std::string_view group = s.substr(j + 1, 3);
            if (group.size() < 3 || !is_digit(group[0]) || !is_digit(group[1]) || !is_digit(group[2]))
                break;
            grouped += group;
            j += 4;
        }
        if (j > i && (j == s.size() || s[j] != ',')) {
            // At least one full group consumed and no dangling separator.
            if (j - i >= 4) {
                digits = grouped;
                i = j;
            }
        }
    }

    // Fraction part.
    std::string fraction;
    bool has_point = false;
    if (i < s.size() && s[i] == '.') {
        has_point = true;
        ++i;
        start = i;
        while (i < s.size() && is_digit(s[i])) ++i;
        fraction.assign(s.substr(start, i - start));
    }

    if (i != s.size()) return out;                       // trailing junk
    if (digits.empty() && fraction.empty()) return out;  // no digits at all

    std::string cleaned;
    if (negative) cleaned += '-';
    cleaned += digits.empty() ? "0" : digits;
    if (has_point) {
        cleaned += '.';
        cleaned += fraction;
    }
    char* endp = nullptr;
    double v = std::strtod(cleaned.c_str(), &endp);
    if (endp == cleaned.c_str() || !std::isfinite(v)) return out;

    out.ok = true;
    out.value = v;
    out.currency = currency;
    return out;
}

std::vector<std::string> Table::headers() const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const auto& c : columns) names.push_back(c.name);
    return names;
}

bool Table::has_column(std::string_view name) const {
    return std::any_of(columns.begin(), columns.end(),
                       [&](const Column& c) { return c.name == name; });
}

const Column& Table::column(std::string_view name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw std::runtime_error("unknown column '" + std::string(name) + "' in dataset '" +
                             dataset_id + "'");
}

Table parse_table(std::string_view text, std::string dataset_id, char delimiter) {
    auto rows = split_delimited(text, delimiter);
    if (rows.empty())
        throw std::runtime_error("dataset '" + dataset_id + "': no header row");

    Table table;
    table.dataset_id = std::move(dataset_id);

    std::set<std::string> seen;
    for (const auto& raw : rows.front()) {
        std::string name = trim(raw);
        if (!seen.insert(name).second)
            throw std::runtime_error("dataset '" + table.dataset_id + "': duplicate header '" +
                                     name + "'");
        table.columns.push_back(Column{name, {}, false});
    }

    const std::size_t width = table.columns.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw std::runtime_error("dataset '" + table.dataset_id + "': ragged row at row " +
                                     std::to_string(r) + " (expected " + std::to_string(width) +
                                     " fields, got " + std::to_string(rows[r].size()) + ")");
        for (std::size_t c = 0; c < width; ++c)
            table.columns[c].cells.push_back(make_cell(rows[r][c], table.columns[c].currency_flag));
    }
    return table;
}

Table load_table(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str(), path.filename().string(), delimiter);
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return expand_scientific(std::string_view(buf, res.ptr - buf));
}

std::string table_to_text(const Table& table, char delimiter) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += delimiter;
        write_field(out, table.columns[c].name, delimiter);
    }
    out += '\n';
    const std::size_t rows = table.row_count();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += delimiter;
            const Cell& cell = table.columns[c].cells[r];
            if (is_number(cell)) write_field(out, format_number(as_number(cell)), delimiter);
            else if (is_text(cell)) write_field(out, as_text(cell), delimiter);
        }
        out += '\n';
    }
    return out;
}

void save_table(const Table& table, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path.string() + "'");
    out << table_to_text(table, delimiter);
}

ColumnKind classify_column(const std::vector<Cell>& cells) {
    std::size_t non_empty = 0;
    std::size_t numeric = 0;
    for (const auto& c : cells) {
        if (is_empty(c)) continue;
        ++non_empty;
        if (is_number(c)) ++numeric;
    }
    ColumnKind out;
    if (non_empty == 0) {
        out.kind = ColumnKind::Kind::empty;
        out.numeric_fraction = 0.0;
        return out;
    }
    out.numeric_fraction = static_cast<double>(numeric) / static_cast<double>(non_empty);
    if (out.numeric_fraction >= 0.9) out.kind = ColumnKind::Kind::numeric;
    else if (out.numeric_fraction <= 0.1) out.kind = ColumnKind::Kind::textual;
    else out.kind = ColumnKind::Kind::mixed;
    return out;
}

std::string_view to_string(ColumnKind::Kind k) {
    switch (k) {
        case ColumnKind::Kind::numeric: return "numeric";
        case ColumnKind::Kind::textual: return "textual";
        case ColumnKind::Kind::mixed: return "mixed";
        case ColumnKind::Kind::empty: return "empty";
    }
    return "unknown";
}

RoleManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest '" + path.string() + "': " + e.what());
    }
    RoleManifest m;
    try {
        m.dataset_id = doc.at("dataset_id").get<std::string>();
        m.measure_columns = doc.at("measure_columns").get<std::vector<std::string>>();
        m.category_columns = doc.at("category_columns").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest '" + path.string() + "': " + e.what());
    }
    return m;
}

void save_manifest(const RoleManifest& manifest, const std::filesystem::path& path) {
    nlohmann::json doc{{"dataset_id", manifest.dataset_id},
                       {"measure_columns", manifest.measure_columns},
                       {"category_columns", manifest.category_columns}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

std::vector<ContextPair> bind_roles(const Table& table, const RoleManifest& manifest) {
    if (manifest.dataset_id != table.dataset_id)
        throw std::runtime_error("manifest dataset_id '" + manifest.dataset_id +
                                 "' does not match table dataset_id '" + table.dataset_id + "'");
    for (const auto& name : manifest.measure_columns)
        if (!table.has_column(name))
            throw std::runtime_error("manifest names unknown column '" + name + "'");
    for (const auto& name : manifest.category_columns) {
        if (!table.has_column(name))
            throw std::runtime_error("manifest names unknown column '" + name + "'");
        if (std::find(manifest.measure_columns.begin(), manifest.measure_columns.end(), name) !=
            manifest.measure_columns.end())
            throw std::runtime_error("column '" + name +
                                     "' is listed as both category and measure");
    }
    std::vector<ContextPair> contexts;
    for (const auto& category : manifest.category_columns)
        for (const auto& measure : manifest.measure_columns)
            contexts.push_back(ContextPair{category, measure});
    return contexts;
}

}  // namespace agglearn
