#include "cvrelay/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ios>
#include <stdexcept>

#include "json.hpp"

namespace cvrelay {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])) != 0) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])) != 0) --end;
    return text.substr(begin, end - begin);
}

double parse_double(const std::string& text, const std::string& what) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": not a number: '" + text + "'");
    }
    if (consumed != text.size()) {
        throw std::invalid_argument(what + ": not a number: '" + text + "'");
    }
    return value;
}

std::string csv_cell(const Cell& cell) {
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
    return std::get<std::string>(cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
    if (const auto* i = std::get_if<long long>(&cell)) return *i;
    if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0.0 ? "inf" : "-inf";
        return *d;
    }
    return std::get<std::string>(cell);
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format '" + text + "' (expected csv or json)");
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void emit_table(std::ostream& os, const Table& table, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c != 0) os << ',';
            os << table.columns[c];
        }
        os << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c != 0) os << ',';
                os << csv_cell(row[c]);
            }
            os << '\n';
        }
        return;
    }
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) {
            obj[table.columns[c]] = json_cell(row[c]);
        }
        out.push_back(std::move(obj));
    }
    os << out.dump(2) << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t colon = text.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.size() == 1) {
        return {parse_double(trim(parts[0]), "grid value")};
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("grid must be 'value' or 'start:stop:step': '" + text + "'");
    }
    const double lo = parse_double(trim(parts[0]), "grid start");
    const double hi = parse_double(trim(parts[1]), "grid stop");
    const double step = parse_double(trim(parts[2]), "grid step");
    if (!(step > 0.0)) {
        throw std::invalid_argument("grid step must be positive: '" + text + "'");
    }
    if (hi < lo - 1e-12) {
        throw std::invalid_argument("grid stop must not be below start: '" + text + "'");
    }
    std::vector<double> values;
    for (long long k = 0;; ++k) {
        const double v = lo + static_cast<double>(k) * step;
        if (v > hi + 1e-12) break;
        values.push_back(v);
    }
    return values;
}

std::map<std::string, ConfigEntry> load_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        throw std::ios_base::failure("cannot open config file '" + path + "'");
    }
    std::map<std::string, ConfigEntry> entries;
    std::string line;
    int number = 0;
    while (std::getline(file, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(number) +
                                        ": expected key=value, got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": empty key");
        }
        if (value.empty()) {
            throw std::invalid_argument(path + ":" + std::to_string(number) +
                                        ": empty value for key '" + key + "'");
        }
        const auto [it, inserted] = entries.emplace(key, ConfigEntry{value, number});
        if (!inserted) {
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": duplicate key '" +
                                        key + "' (first defined on line " +
                                        std::to_string(it->second.line) + ")");
        }
    }
    return entries;
}

}  // namespace cvrelay
