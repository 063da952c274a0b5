#include "parallel.hpp"

#include <wsnperf/bermodel.hpp>
#include <wsnperf/energymodel.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/linkmetrics.hpp>
#include <wsnperf/sweeps.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace wsnperf {

namespace {

SweepAxis range_axis(std::string variable, double start, double stop, int points, Scale scale) {
    SweepAxis a;
    a.variable = std::move(variable);
    a.start = start;
    a.stop = stop;
    a.points = points;
    a.scale = scale;
    return a;
}

std::vector<FigureInfo> build_figures() {
    std::vector<FigureInfo> f;
    f.push_back({"fig2", "Transmission time versus data size", "data_size", "B", true,
                 range_axis("data_size", 1e2, 1e5, 31, Scale::log), {{"propagation_time", {0.0}}}, {}, "protocols"});
    f.push_back({"fig3", "Free-space range versus carrier frequency", "frequency", "Hz", false,
                 range_axis("frequency", 0.4e9, 5e9, 47, Scale::linear),
                 {{"tx_power", {1.0}}, {"rx_sensitivity", {1e-9}}, {"tx_gain", {1.0}}, {"rx_gain", {1.0}}},
                 {"tx_power"}, ""});
    f.push_back({"fig4", "Radio transmit energy versus distance", "distance", "m", false,
                 range_axis("distance", 1.0, 500.0, 500, Scale::linear),
                 {{"packet_bits", {500.0, 1000.0, 2000.0}},
                  {"electronics_energy", {50e-9}},
                  {"fs_amp_energy", {10e-12}},
                  {"mp_amp_energy", {0.0013e-12}}},
                 {"packet_bits"}, ""});
    f.push_back({"fig5", "Received power versus distance", "distance", "m", false,
                 range_axis("distance", 1.0, 500.0, 500, Scale::linear),
                 {{"path_loss", {1.0}}, {"tx_gain", {1.0}}, {"rx_gain", {1.0}}, {"tx_height", {1.5}}, {"rx_height", {1.5}}},
                 {}, "protocols"});
    f.push_back({"fig6", "Chipset power consumption", "", "", false, std::nullopt, {}, {}, "protocols"});
    f.push_back({"fig7", "Chipset normalized energy consumption", "", "", false, std::nullopt, {}, {}, "protocols"});
    f.push_back({"fig8", "Bit error rate versus Eb/N0", "ebn0", "dB", false,
                 range_axis("ebn0", 0.0, 24.0, 25, Scale::linear),
                 {{"gmsk_alpha", {0.68}}, {"mc_bits", {1e5}}}, {}, "modulations"});
    f.push_back({"fig9", "Coding efficiency versus data size", "data_size", "B", true,
                 range_axis("data_size", 1e2, 1e5, 31, Scale::log), {}, {}, "protocols"});
    f.push_back({"fig10", "Packet error probability versus packet length", "packet_length", "bit", true,
                 range_axis("packet_length", 1.0, 1e4, 100, Scale::linear),
                 {{"bit_error_prob", {1e-2, 1e-3, 1e-4}}}, {"bit_error_prob"}, ""});
    f.push_back({"fig11", "Energy index versus packet length", "packet_length", "bit", true,
                 range_axis("packet_length", 17.0, 1e4, 100, Scale::linear),
                 {{"bit_error_prob", {3e-3, 1e-3, 5e-4}},
                  {"overhead_bits", {16.0}},
                  {"transceiver_energy", {100e-9}},
                  {"medium_energy", {200e-9}},
                  {"processing_energy", {100e-9}}},
                 {"bit_error_prob", "overhead_bits"}, ""});
    f.push_back({"fig12", "Real-time throughput versus backoff time", "backoff", "s", false,
                 range_axis("backoff", 0.0, 0.1, 101, Scale::linear),
                 {{"data_bytes", {512.0, 1024.0}}, {"frame_time", {11.39e-3}}}, {"data_bytes"}, ""});
    f.push_back({"fig13", "MCU computation energy versus instruction cycles", "cycles", "cycles", true,
                 range_axis("cycles", 1.0, 1e7, 29, Scale::log),
                 {{"clock_frequency", {8e6, 16e6, 100e6}},
                  {"supply_voltage", {3.0}},
                  {"capacitance", {0.67e-9}},
                  {"leakage_current", {1.196e-3}},
                  {"process_constant", {21.26}},
                  {"thermal_voltage", {0.026}}},
                 {"clock_frequency"}, ""});
    return f;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string join_values(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ' ';
        out += num(v);
    }
    return out;
}

/// Fixed parameters after overrides, with series expanded into combinations.
class Parameters {
public:
    Parameters(const FigureInfo& fig, const std::map<std::string, std::vector<double>>& overrides) : fig_(fig) {
        values_ = fig.default_fixed;
        for (const auto& [name, vals] : overrides) {
            if (!values_.contains(name)) {
                std::string available;
                for (const auto& [k, _] : values_) available += (available.empty() ? "" : ", ") + k;
                throw ValidationError(fig.id + " has no parameter '" + name + "'" +
                                      (available.empty() ? std::string(" (it takes none)") : "; available: " + available));
            }
            if (vals.empty()) throw ValidationError("parameter '" + name + "' needs at least one value");
            const bool is_series = std::find(fig.series.begin(), fig.series.end(), name) != fig.series.end();
            if (vals.size() > 1 && !is_series) {
                throw ValidationError("parameter '" + name + "' of " + fig.id + " takes a single value");
            }
            for (double v : vals) {
                if (!std::isfinite(v)) throw ValidationError("parameter '" + name + "' must be finite");
            }
            values_[name] = vals;
        }
    }

    double get(const std::string& name) const { return values_.at(name).front(); }
    const std::vector<double>& list(const std::string& name) const { return values_.at(name); }

    /// Cartesian product of the series parameters; each entry maps name -> value.
    std::vector<std::map<std::string, double>> combinations() const {
        std::vector<std::map<std::string, double>> combos{{}};
        for (const auto& name : fig_.series) {
            std::vector<std::map<std::string, double>> next;
            for (const auto& c : combos) {
                for (double v : values_.at(name)) {
                    auto extended = c;
                    extended[name] = v;
                    next.push_back(std::move(extended));
                }
            }
            combos = std::move(next);
        }
        return combos;
    }

    /// "base@p=v@q=w" naming only the series that actually vary.
    std::string series_name(const std::string& base, const std::map<std::string, double>& combo) const {
        std::string out = base;
        for (const auto& [name, v] : combo) {
            if (values_.at(name).size() > 1) out += "@" + name + "=" + num(v);
        }
        return out;
    }

    void describe(KeyValues& provenance) const {
        for (const auto& [name, vals] : values_) provenance.emplace_back("param." + name, join_values(vals));
    }

private:
    const FigureInfo& fig_;
    std::map<std::string, std::vector<double>> values_;
};

std::vector<const RegistryEntry*> select_protocols(const SweepSpec& spec, const ProtocolRegistry& registry) {
    std::vector<const RegistryEntry*> out;
    if (spec.selector.empty()) {
        for (const auto& e : registry.entries()) out.push_back(&e);
    } else {
        for (const auto& name : spec.selector) out.push_back(&registry.entry(name));
    }
    return out;
}

std::vector<Scheme> select_schemes(const SweepSpec& spec) {
    std::vector<Scheme> out;
    if (spec.selector.empty()) return {std::begin(kAllSchemes), std::end(kAllSchemes)};
    for (const auto& name : spec.selector) out.push_back(parse_scheme(name));
    return out;
}

std::string describe_axis(const SweepAxis& a) {
    if (!a.values.empty()) return a.variable + " values " + join_values(a.values);
    std::string out = a.variable + (a.scale == Scale::log ? " log " : " linear ") + num(a.start) + ".." + num(a.stop);
    if (a.step) out += " step " + num(*a.step);
    if (a.points) out += " points " + std::to_string(*a.points);
    return out;
}

using Rows = std::vector<std::vector<double>>;

/// Fills one column per item via `value(point, item)`.
template <class Item, class Fn>
void fill_columns(Rows& rows, const std::vector<double>& points, const std::vector<Item>& items, Fn&& value) {
    for (std::size_t r = 0; r < points.size(); ++r) {
        for (const auto& item : items) rows[r].push_back(value(points[r], item));
    }
}

}  // namespace

const std::vector<FigureInfo>& figures() {
    static const std::vector<FigureInfo> all = build_figures();
    return all;
}

const FigureInfo& figure(std::string_view id) {
    for (const auto& f : figures()) {
        if (f.id == id) return f;
    }
    std::string ids;
    for (const auto& f : figures()) ids += (ids.empty() ? "" : ", ") + f.id;
    throw UnknownNameError("unknown figure '" + std::string(id) + "'; valid ids: " + ids);
}

void validate(const SweepAxis& a) {
    if (!a.values.empty()) {
        for (double v : a.values) {
            if (!std::isfinite(v)) throw ValidationError("sweep values must be finite");
        }
        return;
    }
    if (!std::isfinite(a.start) || !std::isfinite(a.stop) || !(a.start < a.stop)) {
        throw ValidationError("sweep needs start < stop");
    }
    if (a.step && a.points) throw ValidationError("give a step or a point count, not both");
    if (a.step && !(*a.step > 0)) throw ValidationError("sweep step must be > 0");
    if (a.points && *a.points < 2) throw ValidationError("sweep needs at least 2 points");
    if (!a.step && !a.points) throw ValidationError("sweep needs a step or a point count");
    if (a.scale == Scale::log && !(a.start > 0)) throw ValidationError("log sweep needs start > 0");
    if (a.step && a.scale == Scale::log) throw ValidationError("log sweeps take a point count, not a step");
    if (a.step && (a.stop - a.start) / *a.step > 1e7) throw ValidationError("sweep step too small");
}

std::vector<double> axis_points(const SweepAxis& a) {
    validate(a);
    if (!a.values.empty()) return a.values;
    std::vector<double> out;
    if (a.step) {
        const auto n = static_cast<std::size_t>(std::floor((a.stop - a.start) / *a.step * (1.0 + 1e-12))) + 1;
        for (std::size_t i = 0; i < n; ++i) out.push_back(a.start + static_cast<double>(i) * *a.step);
        return out;
    }
    const int n = *a.points;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        if (a.scale == Scale::linear) {
            out.push_back(i == n - 1 ? a.stop : a.start + t * (a.stop - a.start));
        } else {
            const double lo = std::log10(a.start);
            const double hi = std::log10(a.stop);
            out.push_back(i == n - 1 ? a.stop : std::pow(10.0, lo + t * (hi - lo)));
        }
    }
    return out;
}

MetricTable run_sweep(const SweepSpec& spec, const ProtocolRegistry& registry) {
    const FigureInfo& fig = figure(spec.figure_id);
    const Parameters params(fig, spec.fixed);

    MetricTable table;
    table.figure_id = fig.id;
    table.provenance.emplace_back("title", fig.title);
    table.provenance.emplace_back("toolkit", std::string(kToolkitVersion));

    if (fig.selects.empty() && !spec.selector.empty()) {
        throw ValidationError(fig.id + " does not take a protocol or modulation selector");
    }
    if (spec.monte_carlo && fig.id != "fig8") throw ValidationError("Monte Carlo overlay is only available for fig8");
    if (spec.monte_carlo && !spec.seed) throw ValidationError("fig8 Monte Carlo overlay requires a seed");

    std::vector<double> points;
    if (fig.variable.empty()) {
        if (spec.axis) throw ValidationError(fig.id + " is a bar chart and takes no swept variable");
    } else {
        SweepAxis axis = spec.axis.value_or(*fig.default_axis);
        if (axis.variable.empty()) axis.variable = fig.variable;
        if (axis.variable != fig.variable) {
            throw ValidationError("cannot sweep '" + axis.variable + "' for " + fig.id + "; it sweeps '" +
                                  fig.variable + "'");
        }
        points = axis_points(axis);
        if (fig.integer_axis) {
            for (auto& p : points) p = std::round(p);
            points.erase(std::unique(points.begin(), points.end()), points.end());
        }
        table.provenance.emplace_back("axis", describe_axis(axis));
        table.columns.push_back({fig.variable, fig.unit});
    }
    params.describe(table.provenance);
    if (!fig.selects.empty()) {
        std::string sel;
        for (const auto& s : spec.selector) sel += (sel.empty() ? "" : " ") + s;
        table.provenance.emplace_back("selector", sel.empty() ? "all" : sel);
    }

    Rows rows(points.size());
    for (std::size_t r = 0; r < points.size(); ++r) rows[r].push_back(points[r]);

    const std::string& id = fig.id;
    if (id == "fig2" || id == "fig9") {
        const auto protocols = select_protocols(spec, registry);
        const double t_prop = id == "fig2" ? params.get("propagation_time") : 0.0;
        for (const auto* e : protocols) table.columns.push_back({e->protocol.name, id == "fig2" ? "s" : "%"});
        fill_columns(rows, points, protocols, [&](double size, const RegistryEntry* e) {
            const auto bytes = static_cast<std::int64_t>(size);
            return id == "fig2" ? transmission_time(e->protocol, bytes, t_prop) : coding_efficiency(e->protocol, bytes);
        });
    } else if (id == "fig3") {
        table.columns.push_back({"wavelength", "m"});
        for (const auto& combo : params.combinations()) table.columns.push_back({params.series_name("range", combo), "m"});
        for (std::size_t r = 0; r < points.size(); ++r) {
            if (!(points[r] > 0)) throw DomainError("frequency must be > 0 Hz");
            const double wavelength = kSpeedOfLight / points[r];
            rows[r].push_back(wavelength);
            for (const auto& combo : params.combinations()) {
                LinkBudget link;
                link.tx_power_w = combo.at("tx_power");
                link.tx_gain = params.get("tx_gain");
                link.rx_gain = params.get("rx_gain");
                link.wavelength_m = wavelength;
                rows[r].push_back(friis_range(link, params.get("rx_sensitivity")));
            }
        }
    } else if (id == "fig4") {
        RadioEnergyParams radio{params.get("electronics_energy"), params.get("fs_amp_energy"), params.get("mp_amp_energy")};
        for (const auto& combo : params.combinations()) {
            table.columns.push_back({params.series_name("energy", combo), "J"});
            const double bits = combo.at("packet_bits");
            if (bits < 1 || bits != std::floor(bits)) throw ValidationError("packet_bits must be a positive integer");
            const auto column = tx_energy(radio, static_cast<std::int64_t>(bits), points);
            for (std::size_t r = 0; r < points.size(); ++r) rows[r].push_back(column[r]);
        }
    } else if (id == "fig5") {
        for (const auto* e : select_protocols(spec, registry)) {
            table.columns.push_back({e->protocol.name, "W"});
            LinkBudget link = LinkBudget::for_protocol(e->protocol);
            link.path_loss_factor = params.get("path_loss");
            link.tx_gain = params.get("tx_gain");
            link.rx_gain = params.get("rx_gain");
            link.tx_antenna_height_m = params.get("tx_height");
            link.rx_antenna_height_m = params.get("rx_height");
            const auto column = received_power(link, points);
            for (std::size_t r = 0; r < points.size(); ++r) rows[r].push_back(column[r]);
        }
    } else if (id == "fig6" || id == "fig7") {
        table.columns.push_back({"direction", "index"});
        table.provenance.emplace_back("direction", "0 = TX 1 = RX");
        rows.assign(2, {});
        rows[0].push_back(0.0);
        rows[1].push_back(1.0);
        for (const auto* e : select_protocols(spec, registry)) {
            if (!e->chipset) continue;
            table.columns.push_back({e->protocol.name, id == "fig6" ? "mW" : "mJ/Mb"});
            for (int d = 0; d < 2; ++d) {
                const Direction dir = d == 0 ? Direction::tx : Direction::rx;
                rows[d].push_back(id == "fig6" ? chipset_power(*e->chipset, dir) * 1000.0
                                               : normalized_energy(*e->chipset, dir));
            }
        }
    } else if (id == "fig8") {
        const auto schemes = select_schemes(spec);
        Modulation base;
        base.gmsk_alpha = params.get("gmsk_alpha");
        for (Scheme s : schemes) table.columns.push_back({std::string(to_string(s)), "prob"});
        fill_columns(rows, points, schemes, [&](double db, Scheme s) {
            Modulation m = base;
            m.scheme = s;
            return ber_analytic(m, db);
        });
        if (spec.monte_carlo) {
            const double mc_bits = params.get("mc_bits");
            if (mc_bits < 1 || mc_bits != std::floor(mc_bits)) throw ValidationError("mc_bits must be a positive integer");
            table.provenance.emplace_back("seed", std::to_string(*spec.seed));
            for (Scheme s : schemes) table.columns.push_back({std::string(to_string(s)) + "_mc", "prob"});
            std::vector<double> mc(points.size() * schemes.size());
            // One independent stream per (point, scheme); rows are placed by index.
            detail::parallel_for(mc.size(), spec.threads, [&](std::size_t task) {
                const std::size_t r = task / schemes.size();
                const std::size_t s = task % schemes.size();
                Modulation m = base;
                m.scheme = schemes[s];
                const auto stream = derive_seed(derive_seed(*spec.seed, r), static_cast<std::uint64_t>(schemes[s]));
                mc[task] = ber_monte_carlo(m, points[r], static_cast<std::uint64_t>(mc_bits), stream, {.threads = 1}).ber;
            });
            for (std::size_t r = 0; r < points.size(); ++r) {
                for (std::size_t s = 0; s < schemes.size(); ++s) rows[r].push_back(mc[r * schemes.size() + s]);
            }
        }
    } else if (id == "fig10") {
        const auto combos = params.combinations();
        for (const auto& c : combos) table.columns.push_back({params.series_name("packet_error", c), "prob"});
        fill_columns(rows, points, combos, [&](double length, const std::map<std::string, double>& c) {
            return packet_error_probability(c.at("bit_error_prob"), length);
        });
    } else if (id == "fig11") {
        const auto combos = params.combinations();
        for (const auto& c : combos) table.columns.push_back({params.series_name("energy_index", c), "bit/J"});
        fill_columns(rows, points, combos, [&](double length, const std::map<std::string, double>& c) {
            EnergyIndexParams p;
            p.packet_overhead_bits = c.at("overhead_bits");
            p.transceiver_energy = params.get("transceiver_energy");
            p.medium_energy = params.get("medium_energy");
            p.processing_energy = params.get("processing_energy");
            return energy_index(length, c.at("bit_error_prob"), p);
        });
    } else if (id == "fig12") {
        const auto combos = params.combinations();
        for (const auto& c : combos) table.columns.push_back({params.series_name("throughput", c), "B/s"});
        fill_columns(rows, points, combos, [&](double backoff, const std::map<std::string, double>& c) {
            return realtime_throughput(c.at("data_bytes"), params.get("frame_time"), backoff);
        });
    } else if (id == "fig13") {
        McuParams mcu;
        mcu.supply_voltage = params.get("supply_voltage");
        mcu.switched_capacitance_per_cycle = params.get("capacitance");
        mcu.leakage_current_scale = params.get("leakage_current");
        mcu.process_constant = params.get("process_constant");
        mcu.thermal_voltage = params.get("thermal_voltage");
        const auto combos = params.combinations();
        table.columns.push_back({"switching", "J"});
        for (const auto& c : combos) table.columns.push_back({params.series_name("leakage", c), "J"});
        for (const auto& c : combos) table.columns.push_back({params.series_name("total", c), "J"});
        for (std::size_t r = 0; r < points.size(); ++r) {
            const auto cycles = static_cast<std::int64_t>(points[r]);
            std::vector<McuEnergy> energies;
            for (const auto& c : combos) {
                McuParams p = mcu;
                p.clock_frequency = c.at("clock_frequency");
                energies.push_back(mcu_energy(p, cycles));
            }
            rows[r].push_back(energies.front().switching);
            for (const auto& e : energies) rows[r].push_back(e.leakage);
            for (const auto& e : energies) rows[r].push_back(e.total);
        }
    }

    for (auto& row : rows) table.add_row(std::move(row));
    return table;
}

double Tolerances::for_column(const std::string& name) const {
    auto it = per_column.find(name);
    return it == per_column.end() ? default_relative : it->second;
}

std::vector<CellComparison> ComparisonReport::failures() const {
    std::vector<CellComparison> out;
    std::copy_if(cells.begin(), cells.end(), std::back_inserter(out), [](const CellComparison& c) { return !c.pass; });
    return out;
}

std::string ComparisonReport::render() const {
    std::string out;
    char buf[256];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%s row %zu column %s: actual %.11e expected %.11e rel.err %.3e tol %.3e\n",
                      c.pass ? "PASS" : "FAIL", c.row + 1, c.column_name.c_str(), c.actual, c.expected,
                      c.relative_error, c.tolerance);
        out += buf;
    }
    out += pass ? "verdict: PASS\n" : "verdict: FAIL (" + std::to_string(failures().size()) + " cells)\n";
    return out;
}

ComparisonReport golden_compare(const MetricTable& table, const MetricTable& reference, const Tolerances& tolerances) {
    if (table.figure_id != reference.figure_id) {
        throw ShapeError("figure mismatch: '" + table.figure_id + "' vs '" + reference.figure_id + "'");
    }
    if (table.columns != reference.columns) throw ShapeError("column names or units differ");
    if (table.rows.size() != reference.rows.size()) {
        throw ShapeError("row count differs: " + std::to_string(table.rows.size()) + " vs " +
                         std::to_string(reference.rows.size()));
    }
    ComparisonReport report;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.columns.size() || reference.rows[r].size() != table.columns.size()) {
            throw ShapeError("row " + std::to_string(r + 1) + " is not rectangular");
        }
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            CellComparison cell;
            cell.row = r;
            cell.column = c;
            cell.column_name = table.columns[c].name;
            cell.actual = table.rows[r][c];
            cell.expected = reference.rows[r][c];
            const double diff = std::abs(cell.actual - cell.expected);
            cell.relative_error = cell.expected == 0.0 ? diff : diff / std::abs(cell.expected);
            cell.tolerance = tolerances.for_column(cell.column_name);
            cell.pass = cell.relative_error <= cell.tolerance;
            report.pass = report.pass && cell.pass;
            report.cells.push_back(cell);
        }
    }
    return report;
}

}  // namespace wsnperf
