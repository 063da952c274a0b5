#pragma once

#include <wsnperf/kernels.hpp>
#include <wsnperf/rational.hpp>
#include <wsnperf/registry.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace wsnperf {

/// Antenna and path parameters for the Friis and two-ray models.
struct LinkBudget {
    double tx_power_w = 1.0;
    double tx_gain = 1.0;
    double rx_gain = 1.0;
    double wavelength_m = 0.125;
    double path_loss_factor = 1.0;
    double tx_antenna_height_m = 1.5;
    double rx_antenna_height_m = 1.5;

    /// Table defaults (L = 1, unity gains, 1.5 m antennas) with the
    /// protocol's transmitted power and carrier wavelength.
    static LinkBudget for_protocol(const ProtocolSpec& spec);
};

void validate(const LinkBudget& link);

kernels::PropagationCoefficients propagation_coefficients(const LinkBudget& link);

struct PacketizationResult {
    std::int64_t packet_count = 0;
    Rational total_overhead_bytes;
    Rational total_on_air_bytes;
};

/// Splits `data_bytes` into ceil(data / max_payload) packets.
PacketizationResult packetize(const ProtocolSpec& spec, std::int64_t data_bytes);

/// On-air bits times the bit time, plus the propagation delay. Seconds.
double transmission_time(const ProtocolSpec& spec, std::int64_t data_bytes, double propagation_time_s = 0.0);

/// Payload as a percentage of on-air bytes.
double coding_efficiency(const ProtocolSpec& spec, std::int64_t data_bytes);

/// Free-space received power, watts.
double friis_received_power(const LinkBudget& link, double distance_m);

/// Distance at which the free-space received power drops to `rx_sensitivity_w`.
double friis_range(const LinkBudget& link, double rx_sensitivity_w);

/// Free-space / two-ray crossover distance d_c = 4 pi sqrt(L) h_t h_r / lambda.
double crossover_distance(const LinkBudget& link);

/// Free space (with loss L) below d_c, two-ray ground reflection at and above it.
double received_power(const LinkBudget& link, double distance_m);

/// received_power over a batch of distances, SIMD-dispatched.
std::vector<double> received_power(const LinkBudget& link, std::span<const double> distances_m);

/// Bytes per second: data / (frame time + backoff time).
double realtime_throughput(double data_bytes, double frame_time_s, double backoff_time_s);

}  // namespace wsnperf
