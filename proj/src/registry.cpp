#include <wsnperf/error.hpp>
#include <wsnperf/registry.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace wsnperf {

extern const char* const kDefaultRegistryDocument;

namespace {

constexpr std::array<std::string_view, 11> kProtocolFields = {
    "name",        "max_data_rate_mbps", "bit_time_us",    "max_payload_bytes", "overhead_bytes", "carrier_frequency_hz",
    "tx_power_w",  "max_cell_nodes",     "basic_cell",     "cell_extension",    "note"};

constexpr std::array<std::string_view, 7> kChipsetFields = {"protocol",      "chipset",       "supply_v", "tx_current_ma",
                                                            "rx_current_ma", "bit_rate_mbps", "note"};

struct ParsedDocument {
    std::vector<ProtocolSpec> protocols;
    std::vector<std::pair<std::size_t, ChipsetSpec>> chipsets;  // (line, record)
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        fields.push_back(trim(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos)));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return fields;
}

double parse_double(std::string_view text, std::size_t line, std::string_view field) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ParseError(line, std::string(field), "expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view text, std::size_t line, std::string_view field) {
    std::int64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(line, std::string(field), "expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

ParsedDocument parse_document(std::string_view document) {
    enum class Section { protocols, chipsets };
    ParsedDocument doc;
    Section section = Section::protocols;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= document.size()) {
        const std::size_t nl = document.find('\n', pos);
        std::string_view line = document.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? document.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;

        if (stripped.front() == '[') {
            if (stripped == "[protocols]") {
                section = Section::protocols;
            } else if (stripped == "[chipsets]") {
                section = Section::chipsets;
            } else {
                throw ParseError(line_no, "section", "unknown section " + std::string(stripped));
            }
            continue;
        }

        const auto f = split_tabs(line);
        if (section == Section::protocols) {
            if (f.size() < 10 || f.size() > 11) {
                throw ParseError(line_no, f.size() < 10 ? std::string(kProtocolFields[f.size()]) : "note",
                                 "protocol record needs 10 or 11 tab-separated fields, got " +
                                     std::to_string(f.size()));
            }
            ProtocolSpec p;
            p.name = std::string(f[0]);
            if (p.name.empty()) throw ParseError(line_no, "name", "empty protocol name");
            p.max_data_rate_mbps = parse_double(f[1], line_no, kProtocolFields[1]);
            p.bit_time_us = parse_double(f[2], line_no, kProtocolFields[2]);
            p.max_payload_bytes = parse_int(f[3], line_no, kProtocolFields[3]);
            try {
                p.overhead_bytes = Rational::parse(f[4]);
            } catch (const Error& e) {
                throw ParseError(line_no, std::string(kProtocolFields[4]), e.what());
            }
            p.carrier_frequency_hz = parse_double(f[5], line_no, kProtocolFields[5]);
            p.tx_power_w = parse_double(f[6], line_no, kProtocolFields[6]);
            p.max_cell_nodes = parse_int(f[7], line_no, kProtocolFields[7]);
            p.basic_cell = std::string(f[8]);
            p.cell_extension = std::string(f[9]);
            if (f.size() == 11) p.note = std::string(f[10]);
            doc.protocols.push_back(std::move(p));
        } else {
            if (f.size() < 6 || f.size() > 7) {
                throw ParseError(line_no, f.size() < 6 ? std::string(kChipsetFields[f.size()]) : "note",
                                 "chipset record needs 6 or 7 tab-separated fields, got " + std::to_string(f.size()));
            }
            ChipsetSpec c;
            c.protocol_name = std::string(f[0]);
            c.chipset_name = std::string(f[1]);
            c.supply_voltage_v = parse_double(f[2], line_no, kChipsetFields[2]);
            c.tx_current_ma = parse_double(f[3], line_no, kChipsetFields[3]);
            c.rx_current_ma = parse_double(f[4], line_no, kChipsetFields[4]);
            c.bit_rate_mbps = parse_double(f[5], line_no, kChipsetFields[5]);
            if (f.size() == 7) c.note = std::string(f[6]);
            doc.chipsets.emplace_back(line_no, std::move(c));
        }
    }
    return doc;
}

void apply(ProtocolRegistry& registry, ParsedDocument doc) {
    for (auto& p : doc.protocols) {
        validate(p);
        registry.upsert(std::move(p));
    }
    for (auto& [line, c] : doc.chipsets) {
        validate(c);
        if (!registry.contains(c.protocol_name)) {
            throw ParseError(line, "protocol", "chipset for unknown protocol '" + c.protocol_name + "'");
        }
        registry.attach_chipset(std::move(c));
    }
}

std::string shortest(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

}  // namespace

std::string normalize_name(std::string_view name) {
    std::string key;
    key.reserve(name.size());
    for (char ch : name) {
        if (ch == '-' || ch == '_' || std::isspace(static_cast<unsigned char>(ch))) continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return key;
}

void validate(const ProtocolSpec& p) {
    const auto fail = [&](const std::string& rule) {
        throw ValidationError("protocol '" + p.name + "': " + rule);
    };
    if (!(p.max_data_rate_mbps > 0)) fail("max_data_rate must be > 0");
    if (!(p.bit_time_us > 0)) fail("bit_time must be > 0");
    if (p.max_payload_bytes < 1) fail("max_payload must be >= 1");
    if (p.overhead_bytes < Rational(0)) fail("overhead must be >= 0");
    if (!(p.carrier_frequency_hz > 0)) fail("carrier_frequency must be > 0");
    if (!(p.tx_power_w > 0)) fail("tx_power must be > 0");
    if (p.max_cell_nodes < 1) fail("max_cell_nodes must be >= 1");
    // Bit time is the reciprocal of the data rate to 1%; the slack absorbs
    // decimal representation (0.009 us x 110 Mb/s sits exactly on the edge).
    const double product = p.bit_time_us * p.max_data_rate_mbps;
    if (std::abs(product - 1.0) > 0.01 + 1e-12) {
        fail("bit_time x max_data_rate = " + shortest(product) + ", must equal 1 within 1%");
    }
}

void validate(const ChipsetSpec& c) {
    const auto fail = [&](const std::string& rule) {
        throw ValidationError("chipset '" + c.chipset_name + "' (" + c.protocol_name + "): " + rule);
    };
    if (!(c.supply_voltage_v > 0)) fail("supply_voltage must be > 0");
    if (!(c.tx_current_ma > 0)) fail("tx_current must be > 0");
    if (!(c.rx_current_ma > 0)) fail("rx_current must be > 0");
    if (!(c.bit_rate_mbps > 0)) fail("bit_rate must be > 0");
}

std::optional<std::size_t> ProtocolRegistry::find(std::string_view name) const {
    auto it = index_.find(normalize_name(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ProtocolRegistry::upsert(ProtocolSpec protocol) {
    const std::string key = normalize_name(protocol.name);
    if (key.empty()) throw ValidationError("protocol name must contain letters or digits");
    if (auto i = find(protocol.name)) {
        entries_[*i].protocol = std::move(protocol);
        return;
    }
    index_.emplace(key, entries_.size());
    entries_.push_back(RegistryEntry{std::move(protocol), std::nullopt});
}

void ProtocolRegistry::attach_chipset(ChipsetSpec chipset) {
    auto i = find(chipset.protocol_name);
    if (!i) throw UnknownNameError("chipset for unknown protocol '" + chipset.protocol_name + "'");
    chipset.protocol_name = entries_[*i].protocol.name;
    entries_[*i].chipset = std::move(chipset);
}

const RegistryEntry& ProtocolRegistry::entry(std::string_view name) const {
    if (auto i = find(name)) return entries_[*i];
    std::string available;
    for (const auto& e : entries_) {
        if (!available.empty()) available += ", ";
        available += e.protocol.name;
    }
    throw UnknownNameError("unknown protocol '" + std::string(name) + "'; available: " + available);
}

const ProtocolSpec& ProtocolRegistry::protocol(std::string_view name) const { return entry(name).protocol; }

const ChipsetSpec* ProtocolRegistry::chipset(std::string_view name) const {
    const auto& e = entry(name);
    return e.chipset ? &*e.chipset : nullptr;
}

bool ProtocolRegistry::contains(std::string_view name) const { return find(name).has_value(); }

std::vector<std::string> ProtocolRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.protocol.name);
    return out;
}

std::string_view default_registry_document() { return kDefaultRegistryDocument; }

ProtocolRegistry parse_registry(std::string_view document) {
    ProtocolRegistry registry;
    apply(registry, parse_document(document));
    return registry;
}

ProtocolRegistry load_registry(std::optional<std::string_view> document) {
    ProtocolRegistry registry = parse_registry(default_registry_document());
    if (document) apply(registry, parse_document(*document));
    return registry;
}

ProtocolRegistry load_registry_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                                "cannot open registry '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_registry(buffer.str());
}

std::string serialize_registry(const ProtocolRegistry& registry) {
    std::string out = "[protocols]\n";
    for (const auto& e : registry.entries()) {
        const auto& p = e.protocol;
        out += p.name + '\t' + shortest(p.max_data_rate_mbps) + '\t' + shortest(p.bit_time_us) + '\t' +
               std::to_string(p.max_payload_bytes) + '\t' + p.overhead_bytes.to_string() + '\t' +
               shortest(p.carrier_frequency_hz) + '\t' + shortest(p.tx_power_w) + '\t' +
               std::to_string(p.max_cell_nodes) + '\t' + p.basic_cell + '\t' + p.cell_extension;
        if (!p.note.empty()) out += '\t' + p.note;
        out += '\n';
    }
    out += "\n[chipsets]\n";
    for (const auto& e : registry.entries()) {
        if (!e.chipset) continue;
        const auto& c = *e.chipset;
        out += c.protocol_name + '\t' + c.chipset_name + '\t' + shortest(c.supply_voltage_v) + '\t' +
               shortest(c.tx_current_ma) + '\t' + shortest(c.rx_current_ma) + '\t' + shortest(c.bit_rate_mbps);
        if (!c.note.empty()) out += '\t' + c.note;
        out += '\n';
    }
    return out;
}

const ProtocolSpec& get_protocol(const ProtocolRegistry& registry, std::string_view name) {
    return registry.protocol(name);
}

}  // namespace wsnperf
