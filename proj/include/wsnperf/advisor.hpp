#pragma once

#include <wsnperf/registry.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace wsnperf {

enum class ApplicationClass { environmental_monitoring, event_detection, tracking, custom };

std::string_view to_string(ApplicationClass cls);
ApplicationClass parse_application_class(std::string_view text);

struct ApplicationProfile {
    ApplicationClass application_class = ApplicationClass::custom;
    double required_data_rate_bps = 0.0;
    double required_range_m = 0.0;
    bool battery_constrained = false;
    std::int64_t data_size_per_message = 32;
};

void validate(const ApplicationProfile& profile);

struct FeatureWeights {
    double energy = 0.0;
    double range = 0.0;
    double efficiency = 0.0;
};

struct AdvisorConfig {
    FeatureWeights battery_weights{0.40, 0.35, 0.25};
    FeatureWeights mains_weights{0.25, 0.45, 0.30};
    double rx_sensitivity_w = 1e-9;
};

struct RankedProtocol {
    std::string name;
    double score = 0.0;
    bool rate_feasible = false;
    double energy_feature = 0.0;
    double range_feature = 0.0;
    double efficiency_feature = 0.0;
    double mean_power_w = 0.0;              // radio power averaged over the profile's duty cycle
    double normalized_tx_energy = 0.0;      // mJ/Mb, +inf without a chipset
    double free_space_range_m = 0.0;
    std::vector<std::string> rules;
};

struct Recommendation {
    std::vector<RankedProtocol> ranking;  // nonincreasing score
    std::vector<std::string> notes;       // application needs that are not scored
};

Recommendation recommend(const ApplicationProfile& profile, const ProtocolRegistry& registry,
                         const AdvisorConfig& config = {});

}  // namespace wsnperf
