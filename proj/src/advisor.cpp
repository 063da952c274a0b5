#include <wsnperf/advisor.hpp>
#include <wsnperf/energymodel.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/linkmetrics.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace wsnperf {

namespace {

constexpr double kLowRateBps = 250e3;
constexpr double kHighRateBps = 10e6;
constexpr double kWideAreaM = 1000.0;
constexpr std::int64_t kSmallMessageBytes = 16;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/// Rank of `value` among `pool` (0 = smallest), counting strictly smaller entries.
std::size_t rank_ascending(double value, const std::vector<double>& pool) {
    return static_cast<std::size_t>(std::count_if(pool.begin(), pool.end(), [&](double v) { return v < value; }));
}

}  // namespace

std::string_view to_string(ApplicationClass cls) {
    switch (cls) {
        case ApplicationClass::environmental_monitoring: return "environmental_monitoring";
        case ApplicationClass::event_detection: return "event_detection";
        case ApplicationClass::tracking: return "tracking";
        case ApplicationClass::custom: return "custom";
    }
    return "custom";
}

ApplicationClass parse_application_class(std::string_view text) {
    std::string key;
    for (char ch : text) key.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (key == "environmental_monitoring" || key == "environmental" || key == "monitoring") {
        return ApplicationClass::environmental_monitoring;
    }
    if (key == "event_detection" || key == "event") return ApplicationClass::event_detection;
    if (key == "tracking") return ApplicationClass::tracking;
    if (key == "custom") return ApplicationClass::custom;
    throw UnknownNameError("unknown application class '" + std::string(text) +
                           "'; available: environmental_monitoring, event_detection, tracking, custom");
}

void validate(const ApplicationProfile& profile) {
    if (!(profile.required_data_rate_bps > 0)) throw ValidationError("required data rate must be > 0 b/s");
    if (!(profile.required_range_m > 0)) throw ValidationError("required range must be > 0 m");
    if (profile.data_size_per_message < 1) throw ValidationError("message size must be >= 1 byte");
}

Recommendation recommend(const ApplicationProfile& profile, const ProtocolRegistry& registry,
                         const AdvisorConfig& config) {
    validate(profile);
    if (registry.empty()) throw DomainError("cannot recommend from an empty registry");
    if (!(config.rx_sensitivity_w > 0)) throw ValidationError("receiver sensitivity must be > 0 W");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<RankedProtocol> ranked;
    for (const auto& entry : registry.entries()) {
        const auto& p = entry.protocol;
        RankedProtocol r;
        r.name = p.name;
        r.rate_feasible = p.max_data_rate_bps() >= profile.required_data_rate_bps;
        r.free_space_range_m = friis_range(LinkBudget::for_protocol(p), config.rx_sensitivity_w);
        r.efficiency_feature = coding_efficiency(p, profile.data_size_per_message) / 100.0;
        if (entry.chipset) {
            const auto& c = *entry.chipset;
            // The link is held open; the transmitter is on for the fraction of
            // time needed to carry the required rate.
            const double duty = std::min(1.0, profile.required_data_rate_bps / (c.bit_rate_mbps * 1e6));
            r.mean_power_w = duty * chipset_power(c, Direction::tx) + (1.0 - duty) * chipset_power(c, Direction::rx);
            r.normalized_tx_energy = normalized_energy(c, Direction::tx);
        } else {
            r.mean_power_w = inf;
            r.normalized_tx_energy = inf;
        }
        ranked.push_back(std::move(r));
    }

    std::vector<double> feasible_power, feasible_norm_energy, feasible_range;
    double best_coverage = 0.0;
    for (const auto& r : ranked) {
        if (!r.rate_feasible) continue;
        if (std::isfinite(r.mean_power_w)) feasible_power.push_back(r.mean_power_w);
        feasible_norm_energy.push_back(r.normalized_tx_energy);
        feasible_range.push_back(-r.free_space_range_m);
        best_coverage = std::max(best_coverage, std::min(1.0, r.free_space_range_m / profile.required_range_m));
    }
    const double p_min = feasible_power.empty() ? 0.0 : *std::min_element(feasible_power.begin(), feasible_power.end());
    const double p_max = feasible_power.empty() ? 0.0 : *std::max_element(feasible_power.begin(), feasible_power.end());

    const FeatureWeights& w = profile.battery_constrained ? config.battery_weights : config.mains_weights;
    const bool low_rate = profile.required_data_rate_bps <= kLowRateBps;
    const bool monitoring_class = profile.application_class != ApplicationClass::custom;

    for (auto& r : ranked) {
        if (!r.rate_feasible) {
            r.score = 0.0;
            r.energy_feature = r.range_feature = 0.0;
            r.rules.push_back("rate-filter: max rate " + fmt(registry.protocol(r.name).max_data_rate_mbps) +
                              " Mb/s is below the required " + fmt(profile.required_data_rate_bps / 1e6) + " Mb/s");
            continue;
        }
        if (!std::isfinite(r.mean_power_w)) {
            r.energy_feature = 0.0;
        } else if (p_max > p_min) {
            r.energy_feature = (std::log(p_max) - std::log(r.mean_power_w)) / (std::log(p_max) - std::log(p_min));
        } else {
            r.energy_feature = 1.0;
        }
        const double coverage = std::min(1.0, r.free_space_range_m / profile.required_range_m);
        r.range_feature = best_coverage > 0 ? coverage / best_coverage : 0.0;
        r.score = w.energy * r.energy_feature + w.range * r.range_feature + w.efficiency * r.efficiency_feature;

        if (profile.battery_constrained && low_rate && std::isfinite(r.mean_power_w) &&
            rank_ascending(r.mean_power_w, feasible_power) < 2) {
            r.rules.push_back("low-rate-battery: among the two lowest-power radios for a low-rate, battery-limited node");
        }
        if (profile.required_data_rate_bps >= kHighRateBps &&
            rank_ascending(r.normalized_tx_energy, feasible_norm_energy) < 3) {
            r.rules.push_back("high-rate-efficiency: low normalized energy per megabit at high data rate");
        }
        if (low_rate && profile.required_range_m >= kWideAreaM &&
            rank_ascending(-r.free_space_range_m, feasible_range) == 0) {
            r.rules.push_back("wide-area-low-rate: widest coverage for low-rate monitoring over a large area");
        }
        if (profile.data_size_per_message <= kSmallMessageBytes &&
            registry.protocol(r.name).max_data_rate_bps() <= 1e6) {
            r.rules.push_back("small-telemetry: low-rate protocol suited to short sensor readings");
        }
        if (monitoring_class && profile.required_range_m >= kWideAreaM &&
            rank_ascending(-r.free_space_range_m, feasible_range) < 2) {
            r.rules.push_back("large-coverage-class: among the two widest-coverage options for this application class");
        }
    }

    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedProtocol& a, const RankedProtocol& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.normalized_tx_energy != b.normalized_tx_energy) return a.normalized_tx_energy < b.normalized_tx_energy;
        return a.name < b.name;
    });

    Recommendation out;
    out.ranking = std::move(ranked);
    switch (profile.application_class) {
        case ApplicationClass::environmental_monitoring:
            out.notes.push_back("needs (not scored): measurement and regular sending, few data, long battery life, "
                                "permanent connection");
            if (!profile.battery_constrained) out.notes.push_back("this class usually needs long battery life; see --battery");
            break;
        case ApplicationClass::event_detection:
            out.notes.push_back("needs (not scored): alert message, priority, confirmation status, few data, "
                                "permanent connection");
            break;
        case ApplicationClass::tracking:
            out.notes.push_back("needs (not scored): mobility, few data, localization, permanent connection");
            break;
        case ApplicationClass::custom: break;
    }
    return out;
}

}  // namespace wsnperf
