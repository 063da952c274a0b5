#pragma once

#include <wsnperf/rational.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wsnperf {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Rate, framing, radio and cell parameters of one wireless protocol.
struct ProtocolSpec {
    std::string name;
    double max_data_rate_mbps = 0.0;
    double bit_time_us = 0.0;
    std::int64_t max_payload_bytes = 0;
    Rational overhead_bytes;
    double carrier_frequency_hz = 0.0;
    double tx_power_w = 0.0;
    std::int64_t max_cell_nodes = 0;
    std::string basic_cell;
    std::string cell_extension;
    std::string note;

    double wavelength_m() const noexcept { return kSpeedOfLight / carrier_frequency_hz; }
    double bit_time_s() const noexcept { return bit_time_us * 1e-6; }
    double max_data_rate_bps() const noexcept { return max_data_rate_mbps * 1e6; }

    friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

/// Supply and current figures of a representative chipset.
struct ChipsetSpec {
    std::string protocol_name;
    std::string chipset_name;
    double supply_voltage_v = 0.0;
    double tx_current_ma = 0.0;
    double rx_current_ma = 0.0;
    double bit_rate_mbps = 0.0;
    std::string note;

    friend bool operator==(const ChipsetSpec&, const ChipsetSpec&) = default;
};

/// Throws ValidationError naming the protocol and the broken rule.
void validate(const ProtocolSpec& spec);
void validate(const ChipsetSpec& chipset);

struct RegistryEntry {
    ProtocolSpec protocol;
    std::optional<ChipsetSpec> chipset;

    friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Immutable once built; lookups are case-insensitive and ignore '-', '_' and spaces.
class ProtocolRegistry {
public:
    ProtocolRegistry() = default;

    /// Adds or replaces the entry with the same (normalized) name.
    void upsert(ProtocolSpec protocol);
    /// The owning protocol must already be present.
    void attach_chipset(ChipsetSpec chipset);

    const ProtocolSpec& protocol(std::string_view name) const;
    const RegistryEntry& entry(std::string_view name) const;
    const ChipsetSpec* chipset(std::string_view name) const;
    bool contains(std::string_view name) const;

    /// Entries in insertion order.
    const std::vector<RegistryEntry>& entries() const noexcept { return entries_; }
    std::vector<std::string> names() const;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    friend bool operator==(const ProtocolRegistry& a, const ProtocolRegistry& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::optional<std::size_t> find(std::string_view name) const;

    std::vector<RegistryEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// Lowercased name with '-', '_' and whitespace removed.
std::string normalize_name(std::string_view name);

/// The embedded default document, verbatim.
std::string_view default_registry_document();

/// Parses a registry document into a standalone registry (no defaults).
ProtocolRegistry parse_registry(std::string_view document);

/// Defaults, with entries of `document` (if any) overriding or extending them.
ProtocolRegistry load_registry(std::optional<std::string_view> document = std::nullopt);

/// Reads `path` and calls load_registry. Missing file raises std::system_error.
ProtocolRegistry load_registry_file(const std::filesystem::path& path);

/// Serializes in the registry document format; parse_registry round-trips it.
std::string serialize_registry(const ProtocolRegistry& registry);

/// Case-insensitive lookup; unknown names raise UnknownNameError listing the available ones.
const ProtocolSpec& get_protocol(const ProtocolRegistry& registry, std::string_view name);

}  // namespace wsnperf
