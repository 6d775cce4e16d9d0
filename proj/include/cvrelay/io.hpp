#pragma once

#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace cvrelay {

enum class OutputFormat { Csv, Json };

// Accepts "csv" or "json"; anything else is an invalid parameter.
OutputFormat parse_format(const std::string& text);

// One table cell: an integer, a floating-point number, or a text label.
using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    template <typename... Ts>
    void add_row(Ts&&... values) {
        rows.push_back({Cell(std::forward<Ts>(values))...});
    }
};

// Shortest round-trippable fixed formatting used across all emitters.
std::string format_number(double value);

// CSV: header row plus one line per row, comma separated, trailing newline.
// JSON: array of objects keyed by column name; non-finite numbers become
// the strings "inf", "-inf" or "nan" so the output stays parseable.
void emit_table(std::ostream& os, const Table& table, OutputFormat format);

// Parses either a single value "a" or an inclusive range "a:b:c" with
// positive step c. The stop value is included when it lies within 1e-12
// of the final grid point.
std::vector<double> parse_grid(const std::string& text);

struct ConfigEntry {
    std::string value;
    int line = 0;
};

// key=value file with '#' comments and blank lines. Returns each key with
// the line it was defined on so callers can report precise errors. Syntax
// problems raise std::invalid_argument with "path:line:" prefixes; an
// unreadable file raises std::ios_base::failure.
std::map<std::string, ConfigEntry> load_config_file(const std::string& path);

}  // namespace cvrelay
