#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsnperf {

struct Column {
    std::string name;
    std::string unit;

    friend bool operator==(const Column&, const Column&) = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Rectangular numeric table with per-column units and provenance lines.
struct MetricTable {
    std::string figure_id;
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;
    KeyValues provenance;

    /// Throws ShapeError unless the row has one value per column.
    void add_row(std::vector<double> row);
    /// Throws UnknownNameError.
    std::size_t column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;

    friend bool operator==(const MetricTable&, const MetricTable&) = default;
};

/// Scientific notation, 12 significant digits ("%.11e").
std::string format_number(double value);
/// Value as it reads back from format_number.
double round_to_wire(double value);

/// `#`-prefixed provenance ("# key: value"), header `name(unit)`, then rows.
std::string to_csv(const MetricTable& table);
/// Inverse of to_csv. Throws ParseError naming the line.
MetricTable parse_csv(std::string_view text);

/// {"inputs": {...}, "columns": [{"name","unit"}], "rows": [[...]], "provenance": {...}}.
/// Numbers are rounded to the same 12 significant digits as the CSV.
std::string to_json(const MetricTable& table, const KeyValues& inputs);

}  // namespace wsnperf
