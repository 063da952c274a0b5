#include <wsnperf/advisor.hpp>
#include <wsnperf/bermodel.hpp>
#include <wsnperf/cli.hpp>
#include <wsnperf/energymodel.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/kernels.hpp>
#include <wsnperf/linkmetrics.hpp>
#include <wsnperf/metric_table.hpp>
#include <wsnperf/registry.hpp>
#include <wsnperf/sweeps.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <system_error>

namespace wsnperf::cli {

namespace {

struct Suffix {
    std::string_view text;
    double scale;
};

const std::map<Quantity, std::vector<Suffix>>& suffixes() {
    static const std::map<Quantity, std::vector<Suffix>> table{
        {Quantity::none, {}},
        {Quantity::length, {{"m", 1.0}, {"km", 1e3}, {"cm", 1e-2}, {"mm", 1e-3}}},
        {Quantity::frequency, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
        {Quantity::rate,
         {{"bps", 1.0}, {"kbps", 1e3}, {"Mbps", 1e6}, {"Gbps", 1e9}, {"b/s", 1.0}, {"kb/s", 1e3}, {"Mb/s", 1e6},
          {"Gb/s", 1e9}}},
        {Quantity::time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}},
        {Quantity::power, {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}}},
        {Quantity::energy, {{"J", 1.0}, {"mJ", 1e-3}, {"uJ", 1e-6}, {"nJ", 1e-9}, {"pJ", 1e-12}}},
        {Quantity::bytes, {{"B", 1.0}, {"kB", 1e3}, {"MB", 1e6}}},
        {Quantity::voltage, {{"V", 1.0}, {"mV", 1e-3}}},
        {Quantity::current, {{"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}}},
        {Quantity::capacitance, {{"F", 1.0}, {"uF", 1e-6}, {"nF", 1e-9}, {"pF", 1e-12}}},
    };
    return table;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

double parse_quantity(std::string_view text, Quantity quantity) {
    const std::string s = trim(text);
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) throw ValidationError("'" + s + "' is not a number");
    const std::string suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    if (suffix.empty()) return value;
    const auto& options = suffixes().at(quantity);
    for (const auto& sfx : options) {
        if (sfx.text == suffix) return value * sfx.scale;
    }
    for (const auto& sfx : options) {
        if (iequals(sfx.text, suffix)) return value * sfx.scale;
    }
    std::string accepted;
    for (const auto& sfx : options) accepted += (accepted.empty() ? "" : ", ") + std::string(sfx.text);
    throw ValidationError("unknown unit '" + suffix + "' in '" + s + "'" +
                          (accepted.empty() ? std::string("; this value takes no unit") : "; accepted: " + accepted));
}

std::string unit_table() {
    static const std::pair<Quantity, std::string_view> names[] = {
        {Quantity::length, "length"},   {Quantity::frequency, "frequency"}, {Quantity::rate, "data rate"},
        {Quantity::time, "time"},       {Quantity::power, "power"},         {Quantity::energy, "energy"},
        {Quantity::bytes, "size"},      {Quantity::voltage, "voltage"},     {Quantity::current, "current"},
        {Quantity::capacitance, "capacitance"},
    };
    std::string out = "Unit suffixes (values without a suffix are SI base units; matching is case-insensitive\n"
                      "unless that is ambiguous):\n";
    char buf[64];
    for (const auto& [q, name] : names) {
        std::snprintf(buf, sizeof buf, "  %-12s", std::string(name).c_str());
        out += buf;
        bool first = true;
        for (const auto& sfx : suffixes().at(q)) {
            std::snprintf(buf, sizeof buf, "%s%s = %g", first ? "" : ", ", std::string(sfx.text).c_str(), sfx.scale);
            out += buf;
            first = false;
        }
        out += '\n';
    }
    return out;
}

namespace {

struct UsageError : Error {
    using Error::Error;
};

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ---------------------------------------------------------------- metric

struct FlagInfo {
    std::string name;
    Quantity quantity;
    std::string help;
    bool text = false;  // taken verbatim (names), not as a number
};

const std::vector<FlagInfo>& metric_flags() {
    static const std::vector<FlagInfo> flags{
        {"protocol", Quantity::none, "protocol name from the registry", true},
        {"size", Quantity::bytes, "data size in bytes"},
        {"prop-time", Quantity::time, "propagation time"},
        {"distance", Quantity::length, "transmitter-receiver distance"},
        {"tx-power", Quantity::power, "transmit power"},
        {"frequency", Quantity::frequency, "carrier frequency"},
        {"wavelength", Quantity::length, "carrier wavelength"},
        {"gain-tx", Quantity::none, "transmit antenna gain (linear)"},
        {"gain-rx", Quantity::none, "receive antenna gain (linear)"},
        {"sensitivity", Quantity::power, "receiver sensitivity"},
        {"path-loss", Quantity::none, "system loss factor L >= 1"},
        {"tx-height", Quantity::length, "transmit antenna height"},
        {"rx-height", Quantity::length, "receive antenna height"},
        {"k", Quantity::none, "message length in bits"},
        {"e-elec", Quantity::energy, "electronics energy per bit"},
        {"eps-fs", Quantity::energy, "free-space amplifier energy per bit per m^2"},
        {"eps-amp", Quantity::energy, "multipath amplifier energy per bit per m^4"},
        {"direction", Quantity::none, "tx or rx", true},
        {"length", Quantity::none, "packet length in bits"},
        {"ber", Quantity::none, "bit error probability"},
        {"overhead", Quantity::none, "packet overhead in bits"},
        {"retransmissions", Quantity::none, "fixed retransmission count (default: expected value)"},
        {"e-t", Quantity::energy, "transceiver energy per attempt"},
        {"e-m", Quantity::energy, "medium energy per attempt"},
        {"e-c", Quantity::energy, "processing energy per attempt"},
        {"cycles", Quantity::none, "instruction cycles"},
        {"voltage", Quantity::voltage, "supply voltage"},
        {"clock", Quantity::frequency, "clock frequency"},
        {"capacitance", Quantity::capacitance, "switched capacitance per cycle"},
        {"i0", Quantity::current, "leakage current scale"},
        {"process-constant", Quantity::none, "leakage process constant n"},
        {"vt", Quantity::voltage, "thermal voltage"},
        {"modulation", Quantity::none, "modulation scheme", true},
        {"ebn0", Quantity::none, "Eb/N0 in dB"},
        {"alpha", Quantity::none, "GMSK degradation factor"},
        {"subcarrier", Quantity::none, "OFDM subcarrier modulation", true},
        {"target", Quantity::none, "target bit error rate"},
        {"frame-time", Quantity::time, "frame time"},
        {"backoff", Quantity::time, "backoff time"},
    };
    return flags;
}

class MetricArgs {
public:
    MetricArgs(const std::map<std::string, std::string>& raw, const ProtocolRegistry& registry)
        : raw_(raw), registry_(registry) {}

    bool has(const std::string& name) const { return raw_.contains(name); }

    double number(const std::string& name) const {
        auto it = raw_.find(name);
        if (it == raw_.end()) throw UsageError("missing required flag --" + name);
        const auto& flags = metric_flags();
        const auto info = std::find_if(flags.begin(), flags.end(), [&](const FlagInfo& f) { return f.name == name; });
        try {
            return parse_quantity(it->second, info->quantity);
        } catch (const ValidationError& e) {
            throw UsageError("--" + name + ": " + e.what());
        }
    }
    double number(const std::string& name, double fallback) const { return has(name) ? number(name) : fallback; }

    std::int64_t integer(const std::string& name) const {
        const double v = number(name);
        if (!(v >= 0) || v != std::floor(v) || v > 9e15) {
            throw UsageError("--" + name + " must be a nonnegative integer");
        }
        return static_cast<std::int64_t>(v);
    }

    std::string text(const std::string& name) const {
        auto it = raw_.find(name);
        if (it == raw_.end()) throw UsageError("missing required flag --" + name);
        return it->second;
    }

    const RegistryEntry& entry() const { return registry_.entry(text("protocol")); }

    LinkBudget link() const {
        LinkBudget link = has("protocol") ? LinkBudget::for_protocol(entry().protocol) : LinkBudget{};
        if (has("frequency") && has("wavelength")) throw UsageError("give --frequency or --wavelength, not both");
        if (has("frequency")) {
            const double f = number("frequency");
            if (!(f > 0)) throw ValidationError("frequency must be > 0");
            link.wavelength_m = kSpeedOfLight / f;
        }
        link.wavelength_m = number("wavelength", link.wavelength_m);
        link.tx_power_w = number("tx-power", link.tx_power_w);
        link.tx_gain = number("gain-tx", link.tx_gain);
        link.rx_gain = number("gain-rx", link.rx_gain);
        link.path_loss_factor = number("path-loss", link.path_loss_factor);
        link.tx_antenna_height_m = number("tx-height", link.tx_antenna_height_m);
        link.rx_antenna_height_m = number("rx-height", link.rx_antenna_height_m);
        return link;
    }

    Direction direction() const {
        if (!has("direction")) return Direction::tx;
        const auto d = text("direction");
        if (iequals(d, "tx")) return Direction::tx;
        if (iequals(d, "rx")) return Direction::rx;
        throw UsageError("--direction must be tx or rx");
    }

    const ChipsetSpec& chipset() const {
        const auto& e = entry();
        if (!e.chipset) throw DomainError("protocol '" + e.protocol.name + "' has no chipset data");
        return *e.chipset;
    }

    Modulation modulation() const {
        Modulation m;
        m.scheme = parse_scheme(text("modulation"));
        m.gmsk_alpha = number("alpha", m.gmsk_alpha);
        if (has("subcarrier")) m.ofdm_subcarrier = parse_scheme(text("subcarrier"));
        return m;
    }

private:
    const std::map<std::string, std::string>& raw_;
    const ProtocolRegistry& registry_;
};

struct MetricDef {
    std::string name;
    std::string description;
    std::vector<std::string> required;
    std::vector<std::string> optional;
    std::function<std::vector<std::pair<Column, double>>(const MetricArgs&)> compute;
};

const std::vector<std::string> kLinkFlags{"protocol", "tx-power", "frequency", "wavelength", "gain-tx", "gain-rx"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

const std::vector<MetricDef>& metric_defs() {
    using Out = std::vector<std::pair<Column, double>>;
    static const std::vector<MetricDef> defs{
        {"tx-time", "transmission time of a data block", {"protocol", "size"}, {"prop-time"},
         [](const MetricArgs& a) {
             return Out{{{"tx-time", "s"},
                         transmission_time(a.entry().protocol, a.integer("size"), a.number("prop-time", 0.0))}};
         }},
        {"coding-eff", "coding efficiency of a data block", {"protocol", "size"}, {},
         [](const MetricArgs& a) {
             return Out{{{"coding-eff", "%"}, coding_efficiency(a.entry().protocol, a.integer("size"))}};
         }},
        {"friis-power", "free-space received power", {"distance"}, kLinkFlags,
         [](const MetricArgs& a) {
             return Out{{{"friis-power", "W"}, friis_received_power(a.link(), a.number("distance"))}};
         }},
        {"friis-range", "free-space range at a receiver sensitivity", {"sensitivity"}, kLinkFlags,
         [](const MetricArgs& a) {
             return Out{{{"friis-range", "m"}, friis_range(a.link(), a.number("sensitivity"))}};
         }},
        {"rx-power", "two-ray received power", {"distance"},
         concat(kLinkFlags, {"path-loss", "tx-height", "rx-height"}),
         [](const MetricArgs& a) {
             const auto link = a.link();
             return Out{{{"rx-power", "W"}, received_power(link, a.number("distance"))},
                        {{"crossover", "m"}, crossover_distance(link)}};
         }},
        {"tx-energy", "radio energy to send k bits over a distance", {"k", "distance"},
         {"e-elec", "eps-fs", "eps-amp"},
         [](const MetricArgs& a) {
             RadioEnergyParams p;
             p.electronics_energy = a.number("e-elec", p.electronics_energy);
             p.fs_amp_energy = a.number("eps-fs", p.fs_amp_energy);
             p.mp_amp_energy = a.number("eps-amp", p.mp_amp_energy);
             return Out{{{"tx-energy", "J"}, tx_energy(p, a.integer("k"), a.number("distance"))},
                        {{"threshold-distance", "m"}, threshold_distance(p)}};
         }},
        {"chipset-power", "chipset power draw", {"protocol"}, {"direction"},
         [](const MetricArgs& a) {
             return Out{{{"chipset-power", "W"}, chipset_power(a.chipset(), a.direction())}};
         }},
        {"norm-energy", "chipset energy per megabit", {"protocol"}, {"direction"},
         [](const MetricArgs& a) {
             return Out{{{"norm-energy", "mJ/Mb"}, normalized_energy(a.chipset(), a.direction())}};
         }},
        {"energy-index", "useful bits per joule", {"length", "ber"},
         {"overhead", "retransmissions", "e-t", "e-m", "e-c"},
         [](const MetricArgs& a) {
             EnergyIndexParams p;
             p.packet_overhead_bits = a.number("overhead", p.packet_overhead_bits);
             p.transceiver_energy = a.number("e-t", p.transceiver_energy);
             p.medium_energy = a.number("e-m", p.medium_energy);
             p.processing_energy = a.number("e-c", p.processing_energy);
             std::optional<double> n_r;
             if (a.has("retransmissions")) n_r = a.number("retransmissions");
             return Out{{{"energy-index", "bit/J"}, energy_index(a.number("length"), a.number("ber"), p, n_r)}};
         }},
        {"optimal-length", "packet length maximizing the energy index", {"ber"}, {"overhead"},
         [](const MetricArgs& a) {
             const double b = a.number("ber");
             const double o = a.number("overhead", EnergyIndexParams{}.packet_overhead_bits);
             return Out{{{"optimal-length", "bit"}, static_cast<double>(optimal_packet_length(b, o))},
                        {{"stationary-point", "bit"}, optimal_packet_length_continuous(b, o)}};
         }},
        {"mcu-energy", "microcontroller energy for a cycle count", {"cycles"},
         {"voltage", "clock", "capacitance", "i0", "process-constant", "vt"},
         [](const MetricArgs& a) {
             McuParams p;
             p.supply_voltage = a.number("voltage", p.supply_voltage);
             p.clock_frequency = a.number("clock", p.clock_frequency);
             p.switched_capacitance_per_cycle = a.number("capacitance", p.switched_capacitance_per_cycle);
             p.leakage_current_scale = a.number("i0", p.leakage_current_scale);
             p.process_constant = a.number("process-constant", p.process_constant);
             p.thermal_voltage = a.number("vt", p.thermal_voltage);
             const auto e = mcu_energy(p, a.integer("cycles"));
             return Out{{{"switching", "J"}, e.switching}, {{"leakage", "J"}, e.leakage}, {{"total", "J"}, e.total}};
         }},
        {"ber", "bit error rate over AWGN", {"modulation", "ebn0"}, {"alpha", "subcarrier"},
         [](const MetricArgs& a) {
             return Out{{{"ber", "prob"}, ber_analytic(a.modulation(), a.number("ebn0"))}};
         }},
        {"required-ebn0", "Eb/N0 reaching a target bit error rate", {"modulation"}, {"target", "alpha", "subcarrier"},
         [](const MetricArgs& a) {
             return Out{{{"required-ebn0", "dB"}, required_ebn0(a.modulation(), a.number("target", 1e-6))}};
         }},
        {"packet-error", "packet error probability", {"ber", "length"}, {},
         [](const MetricArgs& a) {
             return Out{{{"packet-error", "prob"}, packet_error_probability(a.number("ber"), a.number("length"))}};
         }},
        {"throughput", "real-time throughput", {"size", "frame-time"}, {"backoff"},
         [](const MetricArgs& a) {
             return Out{{{"throughput", "B/s"},
                         realtime_throughput(a.number("size"), a.number("frame-time"), a.number("backoff", 0.0))}};
         }},
    };
    return defs;
}

// ---------------------------------------------------------------- output

enum class Format { text, csv, json };

Format resolve_format(const std::string& format, bool json, Format fallback) {
    if (json) {
        if (!format.empty() && format != "json") throw UsageError("--json conflicts with --format " + format);
        return Format::json;
    }
    if (format.empty()) return fallback;
    if (format == "csv") return Format::csv;
    if (format == "json") return Format::json;
    if (format == "text") return Format::text;
    throw UsageError("--format must be text, csv or json");
}

void emit(const std::string& payload, const std::string& out_path, std::ostream& out) {
    if (out_path.empty() || out_path == "-") {
        out << payload;
        return;
    }
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::system_error(errno, std::generic_category(), "cannot write '" + out_path + "'");
    file << payload;
    if (!file) throw std::system_error(errno, std::generic_category(), "cannot write '" + out_path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                                "cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) line += i + 1 == row.size() ? row[i] : pad(row[i], widths[i] + 2);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

// ---------------------------------------------------------------- commands

std::string list_text(const ProtocolRegistry& registry) {
    std::vector<std::vector<std::string>> rows{{"protocol", "max_rate", "bit_time", "max_payload", "overhead",
                                                "carrier", "tx_power", "max_cell_nodes", "basic_cell",
                                                "cell_extension"}};
    for (const auto& e : registry.entries()) {
        const auto& p = e.protocol;
        rows.push_back({p.name, fmt_g(p.max_data_rate_mbps) + " Mb/s", fmt_g(p.bit_time_us) + " us",
                        std::to_string(p.max_payload_bytes) + " B", fmt_g(p.overhead_bytes.to_double()) + " B",
                        fmt_g(p.carrier_frequency_hz / 1e9) + " GHz", fmt_g(p.tx_power_w) + " W",
                        std::to_string(p.max_cell_nodes), p.basic_cell, p.cell_extension});
    }
    std::string out = render_rows(rows);
    std::vector<std::vector<std::string>> chips{{"protocol", "chipset", "supply", "tx_current", "rx_current",
                                                 "bit_rate"}};
    for (const auto& e : registry.entries()) {
        if (!e.chipset) continue;
        const auto& c = *e.chipset;
        chips.push_back({e.protocol.name, c.chipset_name, fmt_g(c.supply_voltage_v) + " V",
                         fmt_g(c.tx_current_ma) + " mA", fmt_g(c.rx_current_ma) + " mA",
                         fmt_g(c.bit_rate_mbps) + " Mb/s"});
    }
    if (chips.size() > 1) out += "\n" + render_rows(chips);
    return out;
}

std::string list_json(const ProtocolRegistry& registry) {
    nlohmann::ordered_json doc;
    doc["protocols"] = nlohmann::ordered_json::array();
    for (const auto& e : registry.entries()) {
        const auto& p = e.protocol;
        nlohmann::ordered_json j;
        j["name"] = p.name;
        j["max_data_rate_mbps"] = p.max_data_rate_mbps;
        j["bit_time_us"] = p.bit_time_us;
        j["max_payload_bytes"] = p.max_payload_bytes;
        j["overhead_bytes"] = p.overhead_bytes.to_string();
        j["carrier_frequency_hz"] = p.carrier_frequency_hz;
        j["tx_power_w"] = p.tx_power_w;
        j["max_cell_nodes"] = p.max_cell_nodes;
        j["basic_cell"] = p.basic_cell;
        j["cell_extension"] = p.cell_extension;
        if (!p.note.empty()) j["note"] = p.note;
        if (e.chipset) {
            const auto& c = *e.chipset;
            j["chipset"] = {{"name", c.chipset_name},
                            {"supply_v", c.supply_voltage_v},
                            {"tx_ma", c.tx_current_ma},
                            {"rx_ma", c.rx_current_ma},
                            {"bit_rate_mbps", c.bit_rate_mbps}};
            if (!c.note.empty()) j["chipset"]["note"] = c.note;
        }
        doc["protocols"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::string recommend_text(const Recommendation& rec) {
    std::vector<std::vector<std::string>> rows{
        {"rank", "protocol", "score", "energy", "range", "efficiency", "mean_power", "range_m", "rules"}};
    char buf[32];
    auto f4 = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    int rank = 1;
    for (const auto& r : rec.ranking) {
        std::string rules;
        for (const auto& rule : r.rules) rules += (rules.empty() ? "" : "; ") + rule;
        rows.push_back({std::to_string(rank++), r.name, f4(r.score), f4(r.energy_feature), f4(r.range_feature),
                        f4(r.efficiency_feature), fmt_g(r.mean_power_w) + " W", fmt_g(r.free_space_range_m),
                        rules});
    }
    std::string out = render_rows(rows);
    for (const auto& n : rec.notes) out += "note: " + n + "\n";
    return out;
}

std::string recommend_json(const Recommendation& rec, const KeyValues& inputs) {
    nlohmann::ordered_json doc;
    doc["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : inputs) doc["inputs"][k] = v;
    doc["ranking"] = nlohmann::ordered_json::array();
    for (const auto& r : rec.ranking) {
        nlohmann::ordered_json j;
        j["protocol"] = r.name;
        j["score"] = round_to_wire(r.score);
        j["rate_feasible"] = r.rate_feasible;
        j["energy_feature"] = round_to_wire(r.energy_feature);
        j["range_feature"] = round_to_wire(r.range_feature);
        j["efficiency_feature"] = round_to_wire(r.efficiency_feature);
        j["mean_power_w"] = round_to_wire(r.mean_power_w);
        j["free_space_range_m"] = round_to_wire(r.free_space_range_m);
        j["rules"] = r.rules;
        doc["ranking"].push_back(std::move(j));
    }
    doc["notes"] = rec.notes;
    return doc.dump(2) + "\n";
}

Quantity axis_quantity(const std::string& unit) {
    if (unit == "B") return Quantity::bytes;
    if (unit == "Hz") return Quantity::frequency;
    if (unit == "m") return Quantity::length;
    if (unit == "s") return Quantity::time;
    return Quantity::none;
}

std::vector<double> parse_list(const std::string& text, Quantity q, const std::string& flag) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        try {
            out.push_back(parse_quantity(item, q));
        } catch (const ValidationError& e) {
            throw UsageError(flag + ": " + e.what());
        }
    }
    return out;
}

std::string figure_list() {
    std::string out;
    for (const auto& f : figures()) out += (out.empty() ? "" : ", ") + f.id;
    return out;
}

ProtocolRegistry load(const std::string& registry_flag) {
    std::string path = registry_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("WSNPERF_REGISTRY"); env && *env) path = env;
    }
    if (path.empty()) return load_registry();
    return load_registry_file(path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wireless protocol performance metrics, figure sweeps and protocol recommendation.", "wsnperf"};
    app.require_subcommand(1, 1);
    app.footer("\n" + unit_table() +
               "\nExit codes: 0 success, 1 domain or computation error, 2 usage or input error.\n"
               "The registry defaults to the built-in tables; WSNPERF_REGISTRY names a TSV file that\n"
               "extends or overrides them, and --registry overrides the variable.");
    app.set_version_flag("--version", std::string(kToolkitVersion));

    std::string registry_path;
    std::string format;
    std::string out_path;
    std::string isa;
    bool json = false;
    app.add_option("--registry", registry_path, "registry TSV file (overrides WSNPERF_REGISTRY)");
    app.add_option("--format", format, "output format: text, csv or json");
    app.add_flag("--json", json, "same as --format json");
    app.add_option("-o,--out", out_path, "write output to a file instead of standard output");
    app.add_option("--isa", isa, "pin SIMD kernels: scalar or avx2 (default: best available)");

    auto* list_cmd = app.add_subcommand("list", "show registry protocols and chipsets");
    list_cmd->fallthrough();

    auto* metric_cmd = app.add_subcommand("metric", "evaluate one metric");
    metric_cmd->fallthrough();
    std::string metric_name;
    std::string metric_help = "one of:";
    for (const auto& d : metric_defs()) metric_help += "\n  " + pad(d.name, 16) + d.description;
    metric_cmd->add_option("name", metric_name, metric_help)->required();
    std::map<std::string, std::string> metric_raw_storage;
    std::map<std::string, CLI::Option*> metric_opts;
    for (const auto& f : metric_flags()) {
        metric_opts[f.name] = metric_cmd->add_option("--" + f.name, metric_raw_storage[f.name], f.help);
    }

    auto* sweep_cmd = app.add_subcommand("sweep", "run a figure sweep and emit a metric table");
    sweep_cmd->fallthrough();
    std::string figure_id;
    std::string start_s, stop_s, step_s, values_s, scale_s, select_s;
    std::optional<int> points;
    std::vector<std::string> sets;
    bool monte_carlo = false;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    sweep_cmd->add_option("figure", figure_id, "figure id: " + figure_list())->required();
    sweep_cmd->add_option("--start", start_s, "axis start (unit suffix allowed)");
    sweep_cmd->add_option("--stop", stop_s, "axis stop");
    sweep_cmd->add_option("--step", step_s, "axis step (linear axes)");
    sweep_cmd->add_option("--points", points, "number of axis points");
    sweep_cmd->add_option("--scale", scale_s, "lin or log");
    sweep_cmd->add_option("--values", values_s, "explicit comma-separated axis values");
    sweep_cmd->add_option("--set", sets, "fixed parameter, name=v or name=v1,v2 for series; repeatable")
        ->allow_extra_args(false);
    sweep_cmd->add_option("--select", select_s, "comma-separated protocols or modulations");
    sweep_cmd->add_flag("--monte-carlo", monte_carlo, "fig8: add simulated columns (needs --seed)");
    sweep_cmd->add_option("--seed", seed, "Monte Carlo seed");
    sweep_cmd->add_option("--threads", threads, "worker threads, 0 = all cores; output does not depend on it");

    auto* compare_cmd = app.add_subcommand("compare", "compare a metric table against a golden table");
    compare_cmd->fallthrough();
    std::string golden_path, actual_path;
    double tolerance = Tolerances{}.default_relative;
    std::vector<std::string> column_tolerances;
    compare_cmd->add_option("golden", golden_path, "golden CSV file")->required();
    compare_cmd->add_option("actual", actual_path,
                            "CSV file to check; omitted: rerun the golden's figure at its axis values");
    compare_cmd->add_option("--tol", tolerance, "relative tolerance for every column");
    compare_cmd->add_option("--tol-column", column_tolerances, "per-column tolerance, name=value; repeatable")
        ->allow_extra_args(false);

    auto* recommend_cmd = app.add_subcommand("recommend", "rank protocols for an application profile");
    recommend_cmd->fallthrough();
    std::string rate_s, range_s, class_s, size_s;
    bool battery = false;
    recommend_cmd->add_option("--rate", rate_s, "required data rate")->required();
    recommend_cmd->add_option("--range", range_s, "required range")->required();
    recommend_cmd->add_flag("--battery", battery, "battery-powered nodes");
    recommend_cmd->add_option("--class", class_s,
                              "environmental-monitoring, event-detection, tracking or custom");
    recommend_cmd->add_option("--size", size_s, "data size per message");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!isa.empty()) {
            const auto parsed = kernels::parse_isa(isa);
            if (!parsed) throw UsageError("--isa must be scalar or avx2");
            if (!kernels::isa_supported(*parsed)) throw UsageError("ISA '" + isa + "' is not supported here");
            kernels::set_isa_override(parsed);
        }
        const ProtocolRegistry registry = load(registry_path);

        if (list_cmd->parsed()) {
            const Format f = resolve_format(format, json, Format::text);
            if (f == Format::csv) throw UsageError("list supports text or json output");
            emit(f == Format::json ? list_json(registry) : list_text(registry), out_path, out);
            return 0;
        }

        if (metric_cmd->parsed()) {
            const auto def = std::find_if(metric_defs().begin(), metric_defs().end(),
                                          [&](const MetricDef& d) { return d.name == metric_name; });
            if (def == metric_defs().end()) {
                std::string names;
                for (const auto& d : metric_defs()) names += (names.empty() ? "" : ", ") + d.name;
                throw UsageError("unknown metric '" + metric_name + "'; valid metrics: " + names);
            }
            std::map<std::string, std::string> raw;
            KeyValues inputs{{"metric", metric_name}};
            for (const auto& f : metric_flags()) {
                if (metric_opts[f.name]->count() == 0) continue;
                const bool known = std::find(def->required.begin(), def->required.end(), f.name) != def->required.end() ||
                                   std::find(def->optional.begin(), def->optional.end(), f.name) != def->optional.end();
                if (!known) throw UsageError("--" + f.name + " does not apply to metric " + metric_name);
                raw[f.name] = metric_raw_storage[f.name];
                inputs.emplace_back(f.name, metric_raw_storage[f.name]);
            }
            for (const auto& r : def->required) {
                if (!raw.contains(r)) throw UsageError("metric " + metric_name + " requires --" + r);
            }
            const auto values = def->compute(MetricArgs(raw, registry));
            MetricTable table;
            table.figure_id = "metric";
            table.provenance.emplace_back("metric", metric_name);
            table.provenance.emplace_back("toolkit", std::string(kToolkitVersion));
            for (const auto& [k, v] : inputs) {
                if (k != "metric") table.provenance.emplace_back("input." + k, v);
            }
            std::vector<double> row;
            for (const auto& [col, v] : values) {
                table.columns.push_back(col);
                row.push_back(v);
            }
            table.add_row(row);
            const Format f = resolve_format(format, json, Format::text);
            std::string payload;
            if (f == Format::json) {
                payload = to_json(table, inputs);
            } else if (f == Format::csv) {
                payload = to_csv(table);
            } else {
                for (const auto& [col, v] : values) payload += col.name + " = " + format_number(v) + " " + col.unit + "\n";
            }
            emit(payload, out_path, out);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            const FigureInfo& fig = figure(figure_id);
            SweepSpec spec;
            spec.figure_id = fig.id;
            spec.monte_carlo = monte_carlo;
            spec.seed = seed;
            spec.threads = threads;
            KeyValues inputs{{"figure", fig.id}};
            const bool axis_flags = !start_s.empty() || !stop_s.empty() || !step_s.empty() || points ||
                                    !scale_s.empty() || !values_s.empty();
            if (axis_flags) {
                if (!fig.default_axis) throw UsageError(fig.id + " takes no axis flags");
                const Quantity q = axis_quantity(fig.unit);
                SweepAxis axis = *fig.default_axis;
                if (!values_s.empty()) {
                    if (!start_s.empty() || !stop_s.empty() || !step_s.empty() || points || !scale_s.empty()) {
                        throw UsageError("--values excludes the range flags");
                    }
                    axis.values = parse_list(values_s, q, "--values");
                    inputs.emplace_back("values", values_s);
                } else {
                    if (!start_s.empty()) axis.start = parse_list(start_s, q, "--start").at(0);
                    if (!stop_s.empty()) axis.stop = parse_list(stop_s, q, "--stop").at(0);
                    if (!scale_s.empty()) {
                        if (scale_s == "lin" || scale_s == "linear") {
                            axis.scale = Scale::linear;
                        } else if (scale_s == "log") {
                            axis.scale = Scale::log;
                        } else {
                            throw UsageError("--scale must be lin or log");
                        }
                    }
                    if (!step_s.empty()) {
                        axis.step = parse_list(step_s, q, "--step").at(0);
                        axis.points.reset();
                    }
                    if (points) {
                        axis.points = *points;
                        if (step_s.empty()) axis.step.reset();
                    }
                    for (const auto& [k, v] : {std::pair{"start", start_s}, {"stop", stop_s}, {"step", step_s},
                                               {"scale", scale_s}}) {
                        if (!v.empty()) inputs.emplace_back(k, v);
                    }
                    if (points) inputs.emplace_back("points", std::to_string(*points));
                }
                spec.axis = axis;
            }
            for (const auto& s : sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("--set expects name=value, got '" + s + "'");
                const std::string name = trim(std::string_view(s).substr(0, eq));
                spec.fixed[name] = parse_list(s.substr(eq + 1), Quantity::none, "--set " + name);
                inputs.emplace_back("set." + name, s.substr(eq + 1));
            }
            if (!select_s.empty()) {
                spec.selector = split(select_s, ',');
                inputs.emplace_back("select", select_s);
            }
            if (monte_carlo) inputs.emplace_back("monte_carlo", "true");
            if (seed) inputs.emplace_back("seed", std::to_string(*seed));
            const MetricTable table = run_sweep(spec, registry);
            const Format f = resolve_format(format, json, Format::csv);
            if (f == Format::text) throw UsageError("sweep supports csv or json output");
            emit(f == Format::json ? to_json(table, inputs) : to_csv(table), out_path, out);
            return 0;
        }

        if (compare_cmd->parsed()) {
            const MetricTable golden = parse_csv(read_file(golden_path));
            MetricTable actual;
            if (!actual_path.empty()) {
                actual = parse_csv(read_file(actual_path));
            } else {
                const FigureInfo& fig = figure(golden.figure_id);
                SweepSpec spec;
                spec.figure_id = fig.id;
                if (fig.default_axis) {
                    SweepAxis axis = *fig.default_axis;
                    axis.values = golden.column(fig.variable);
                    spec.axis = axis;
                }
                std::vector<std::string> selected;
                for (const auto& c : golden.columns) {
                    if (registry.contains(c.name)) selected.push_back(c.name);
                }
                if (fig.selects == "protocols" && selected.size() != registry.size()) spec.selector = selected;
                actual = run_sweep(spec, registry);
            }
            Tolerances tol;
            if (!(tolerance >= 0)) throw UsageError("--tol must be >= 0");
            tol.default_relative = tolerance;
            for (const auto& s : column_tolerances) {
                const auto eq = s.rfind('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("--tol-column expects name=value");
                tol.per_column[s.substr(0, eq)] = parse_list(s.substr(eq + 1), Quantity::none, "--tol-column").at(0);
            }
            const auto report = golden_compare(actual, golden, tol);
            const Format f = resolve_format(format, json, Format::text);
            std::string payload;
            if (f == Format::json) {
                nlohmann::ordered_json doc;
                doc["pass"] = report.pass;
                doc["cells"] = nlohmann::ordered_json::array();
                for (const auto& c : report.cells) {
                    doc["cells"].push_back({{"row", c.row}, {"column", c.column_name}, {"actual", round_to_wire(c.actual)},
                                            {"expected", round_to_wire(c.expected)},
                                            {"relative_error", round_to_wire(c.relative_error)},
                                            {"tolerance", c.tolerance}, {"pass", c.pass}});
                }
                payload = doc.dump(2) + "\n";
            } else if (f == Format::csv) {
                throw UsageError("compare supports text or json output");
            } else {
                payload = report.render();
            }
            emit(payload, out_path, out);
            return report.pass ? 0 : 1;
        }

        if (recommend_cmd->parsed()) {
            ApplicationProfile profile;
            profile.required_data_rate_bps = parse_list(rate_s, Quantity::rate, "--rate").at(0);
            profile.required_range_m = parse_list(range_s, Quantity::length, "--range").at(0);
            profile.battery_constrained = battery;
            if (!class_s.empty()) profile.application_class = parse_application_class(class_s);
            if (!size_s.empty()) {
                const double size = parse_list(size_s, Quantity::bytes, "--size").at(0);
                if (!(size >= 1) || size != std::floor(size)) throw UsageError("--size must be a positive integer");
                profile.data_size_per_message = static_cast<std::int64_t>(size);
            }
            KeyValues inputs{{"rate", rate_s}, {"range", range_s}, {"battery", battery ? "true" : "false"}};
            if (!class_s.empty()) inputs.emplace_back("class", class_s);
            if (!size_s.empty()) inputs.emplace_back("size", size_s);
            const auto rec = recommend(profile, registry);
            const Format f = resolve_format(format, json, Format::text);
            if (f == Format::csv) throw UsageError("recommend supports text or json output");
            emit(f == Format::json ? recommend_json(rec, inputs) : recommend_text(rec), out_path, out);
            return 0;
        }
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::system_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace wsnperf::cli
