#pragma once

#include <wsnperf/metric_table.hpp>
#include <wsnperf/registry.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsnperf {

inline constexpr std::string_view kToolkitVersion = "wsnperf 1.0.0";

enum class Scale { linear, log };

/// Swept variable: a range (by step or point count) or an explicit list of values.
struct SweepAxis {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    std::optional<double> step;
    std::optional<int> points;
    Scale scale = Scale::linear;
    std::vector<double> values;
};

struct SweepSpec {
    std::string figure_id;
    /// Unset: the figure's default axis.
    std::optional<SweepAxis> axis;
    /// Overrides of the figure's fixed parameters; a parameter may take several values.
    std::map<std::string, std::vector<double>> fixed;
    /// Protocol or modulation names; empty selects all.
    std::vector<std::string> selector;
    /// fig8 only: add Monte Carlo columns. Requires a seed.
    bool monte_carlo = false;
    std::optional<std::uint64_t> seed;
    /// 0 = hardware concurrency. Output does not depend on it.
    unsigned threads = 0;
};

struct FigureInfo {
    std::string id;
    std::string title;
    /// Empty for the bar-chart figures, which take no axis.
    std::string variable;
    std::string unit;
    bool integer_axis = false;
    std::optional<SweepAxis> default_axis;
    std::map<std::string, std::vector<double>> default_fixed;
    /// Parameters that may take several values; each combination becomes a column.
    std::vector<std::string> series;
    /// What the selector picks: "protocols", "modulations" or "" (no selector).
    std::string selects;
};

const std::vector<FigureInfo>& figures();
/// Throws UnknownNameError listing the valid ids.
const FigureInfo& figure(std::string_view id);

/// Throws ValidationError for an ill-formed axis.
void validate(const SweepAxis& axis);
std::vector<double> axis_points(const SweepAxis& axis);

MetricTable run_sweep(const SweepSpec& spec, const ProtocolRegistry& registry);

struct Tolerances {
    double default_relative = 1e-9;
    std::map<std::string, double> per_column;

    double for_column(const std::string& name) const;
};

struct CellComparison {
    std::size_t row = 0;
    std::size_t column = 0;
    std::string column_name;
    double actual = 0.0;
    double expected = 0.0;
    double relative_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    bool pass = true;
    std::vector<CellComparison> cells;

    std::vector<CellComparison> failures() const;
    /// One line per cell plus a verdict line.
    std::string render() const;
};

/// Relative error |a - e| / |e| per cell (absolute when e == 0).
/// Throws ShapeError when figure id, columns or row count differ.
ComparisonReport golden_compare(const MetricTable& table, const MetricTable& reference,
                                const Tolerances& tolerances);

}  // namespace wsnperf
