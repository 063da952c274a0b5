#include <wsnperf/error.hpp>
#include <wsnperf/metric_table.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>

namespace wsnperf {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

void MetricTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw ShapeError("row has " + std::to_string(row.size()) + " values for " + std::to_string(columns.size()) +
                         " columns");
    }
    rows.push_back(std::move(row));
}

std::size_t MetricTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    throw UnknownNameError("no column '" + std::string(name) + "' in table " + figure_id);
}

std::vector<double> MetricTable::column(std::string_view name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", value);
    return buf;
}

double round_to_wire(double value) {
    if (!std::isfinite(value)) return value;
    const std::string text = format_number(value);
    double out = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
}

std::string to_csv(const MetricTable& table) {
    std::string out = "# figure: " + table.figure_id + "\n";
    for (const auto& [key, value] : table.provenance) out += "# " + key + ": " + value + "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c].name + "(" + table.columns[c].unit + ")";
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_number(row[c]);
        }
        out += '\n';
    }
    return out;
}

MetricTable parse_csv(std::string_view text) {
    MetricTable table;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (have_header) throw ParseError(line_no, "comment", "provenance lines must precede the header");
            const std::string_view body = trim(line.substr(1));
            const std::size_t colon = body.find(':');
            if (colon == std::string_view::npos) throw ParseError(line_no, "provenance", "expected 'key: value'");
            std::string key(trim(body.substr(0, colon)));
            std::string value(trim(body.substr(colon + 1)));
            if (key == "figure") {
                table.figure_id = std::move(value);
            } else {
                table.provenance.emplace_back(std::move(key), std::move(value));
            }
            continue;
        }
        const auto fields = split(line, ',');
        if (!have_header) {
            for (std::size_t c = 0; c < fields.size(); ++c) {
                const auto f = fields[c];
                const std::size_t open = f.rfind('(');
                if (open == std::string_view::npos || f.back() != ')' || open == 0) {
                    throw ParseError(line_no, "column " + std::to_string(c + 1), "header cell must read name(unit)");
                }
                table.columns.push_back(
                    Column{std::string(f.substr(0, open)), std::string(f.substr(open + 1, f.size() - open - 2))});
            }
            have_header = true;
            continue;
        }
        if (fields.size() != table.columns.size()) {
            throw ParseError(line_no, "row", "expected " + std::to_string(table.columns.size()) + " values, got " +
                                                 std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto f = fields[c];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
                throw ParseError(line_no, table.columns[c].name, "not a number: '" + std::string(f) + "'");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(line_no, "header", "table has no header row");
    return table;
}

std::string to_json(const MetricTable& table, const KeyValues& inputs) {
    nlohmann::ordered_json doc;
    doc["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : inputs) doc["inputs"][k] = v;
    doc["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : table.columns) doc["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) {
            if (std::isfinite(v)) {
                r.push_back(round_to_wire(v));
            } else {
                r.push_back(nullptr);
            }
        }
        doc["rows"].push_back(std::move(r));
    }
    doc["provenance"] = nlohmann::ordered_json::object();
    doc["provenance"]["figure"] = table.figure_id;
    for (const auto& [k, v] : table.provenance) doc["provenance"][k] = v;
    return doc.dump(2) + "\n";
}

}  // namespace wsnperf
