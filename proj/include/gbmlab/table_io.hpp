/**
 * @file table_io.hpp
 * @brief Deterministic tabular output: CSV with '#' metadata lines, or JSON
 *        with a metadata object.
 *
 * Numbers are rendered with std::to_chars at a fixed number of significant
 * digits (12 by default), infinities as the strings "inf"/"-inf" in either
 * format, so files are byte-stable across runs, thread counts and locales.
 * Every stochastic artifact embeds its full parameterization; rerunning the
 * embedded configuration reproduces the file exactly.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gbmlab {

inline constexpr std::string_view kArtifactId = "gbmlab 0.1.0";
inline constexpr int kDefaultPrecision = 12;

/// Fixed-significant-digit rendering; "inf"/"-inf" for infinities.
std::string format_double(double value, int precision = kDefaultPrecision);

/// One table cell: empty, text, integer or real.
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

/// Ordered key/value metadata. Keys named after CLI flags are enough to
/// reproduce the run; derived values use a "derived." prefix.
class Metadata {
public:
    void add(std::string key, std::string value);
    void add(std::string key, std::string_view value) { add(std::move(key), std::string(value)); }
    void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
    void add(std::string key, double value, int precision = kDefaultPrecision);
    void add(std::string key, std::int64_t value);
    void add(std::string key, int value) { add(std::move(key), static_cast<std::int64_t>(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(std::string_view name);  // throws on unknown names

/// Column-major schema, row-major data.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Renders metadata + table in the requested format.
void write_table(std::ostream& out, const Metadata& metadata, const Table& table,
                 OutputFormat format, int precision = kDefaultPrecision);

/// Flat JSON object (for the report and kelly commands). Values are numbers,
/// "inf"/"-inf" strings, plain strings, or null.
class JsonObjectWriter {
public:
    explicit JsonObjectWriter(int precision = kDefaultPrecision) : precision_(precision) {}

    void add(std::string key, double value);
    void add(std::string key, std::string value);
    void add_null(std::string key);

    std::string str() const;

private:
    int precision_;
    std::vector<std::pair<std::string, std::string>> fields_;  // key -> rendered value
};

/// JSON string escaping (quotes included).
std::string json_quote(std::string_view s);

}  // namespace gbmlab
