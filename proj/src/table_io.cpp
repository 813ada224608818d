#include "gbmlab/table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gbmlab {

std::string format_double(double value, int precision) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

void Metadata::add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
}

void Metadata::add(std::string key, double value, int precision) {
    entries_.emplace_back(std::move(key), format_double(value, precision));
}

void Metadata::add(std::string key, std::int64_t value) {
    entries_.emplace_back(std::move(key), std::to_string(value));
}

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format: " + std::string(name));
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("Table: row width does not match column count");
    rows.push_back(std::move(row));
}

std::string json_quote(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof(esc), "\\u%04x", ch);
                    out += esc;
                } else {
                    out.push_back(ch);
                }
        }
    }
    out.push_back('"');
    return out;
}

namespace {

std::string csv_cell(const Cell& cell, int precision) {
    if (std::holds_alternative<std::monostate>(cell)) return "";
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    return format_double(std::get<double>(cell), precision);
}

std::string json_cell(const Cell& cell, int precision) {
    if (std::holds_alternative<std::monostate>(cell)) return "null";
    if (const auto* s = std::get_if<std::string>(&cell)) return json_quote(*s);
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    const double v = std::get<double>(cell);
    if (!std::isfinite(v)) return json_quote(format_double(v, precision));
    return format_double(v, precision);
}

void write_csv(std::ostream& out, const Metadata& metadata, const Table& table, int precision) {
    for (const auto& [key, value] : metadata.entries()) out << "# " << key << "=" << value << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out << ",";
        out << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ",";
            out << csv_cell(row[c], precision);
        }
        out << "\n";
    }
}

void write_json(std::ostream& out, const Metadata& metadata, const Table& table, int precision) {
    out << "{\n  \"metadata\": {";
    bool first = true;
    for (const auto& [key, value] : metadata.entries()) {
        out << (first ? "\n" : ",\n") << "    " << json_quote(key) << ": " << json_quote(value);
        first = false;
    }
    out << "\n  },\n  \"columns\": [";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out << ", ";
        out << json_quote(table.columns[c]);
    }
    out << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << (r > 0 ? ",\n    " : "\n    ") << "[";
        const auto& row = table.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ", ";
            out << json_cell(row[c], precision);
        }
        out << "]";
    }
    out << "\n  ]\n}\n";
}

}  // namespace

void write_table(std::ostream& out, const Metadata& metadata, const Table& table,
                 OutputFormat format, int precision) {
    if (format == OutputFormat::csv)
        write_csv(out, metadata, table, precision);
    else
        write_json(out, metadata, table, precision);
}

void JsonObjectWriter::add(std::string key, double value) {
    const std::string rendered = std::isfinite(value)
                                     ? format_double(value, precision_)
                                     : json_quote(format_double(value, precision_));
    fields_.emplace_back(std::move(key), rendered);
}

void JsonObjectWriter::add(std::string key, std::string value) {
    fields_.emplace_back(std::move(key), json_quote(value));
}

void JsonObjectWriter::add_null(std::string key) { fields_.emplace_back(std::move(key), "null"); }

std::string JsonObjectWriter::str() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        out += "  " + json_quote(fields_[i].first) + ": " + fields_[i].second;
        out += (i + 1 < fields_.size()) ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

}  // namespace gbmlab
