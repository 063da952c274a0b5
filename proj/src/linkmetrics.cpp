#include <wsnperf/error.hpp>
#include <wsnperf/linkmetrics.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace wsnperf {

namespace {

void require_positive_size(std::int64_t data_bytes) {
    if (data_bytes < 1) {
        throw DomainError("data size must be >= 1 byte, got " + std::to_string(data_bytes));
    }
}

void require_positive_distance(double distance_m) {
    if (!(distance_m > 0) || !std::isfinite(distance_m)) {
        throw DomainError("distance must be > 0 m, got " + std::to_string(distance_m));
    }
}

}  // namespace

LinkBudget LinkBudget::for_protocol(const ProtocolSpec& spec) {
    LinkBudget link;
    link.tx_power_w = spec.tx_power_w;
    link.wavelength_m = spec.wavelength_m();
    return link;
}

void validate(const LinkBudget& link) {
    if (!(link.tx_power_w > 0)) throw ValidationError("link budget: tx_power must be > 0");
    if (!(link.tx_gain > 0) || !(link.rx_gain > 0)) throw ValidationError("link budget: antenna gains must be > 0");
    if (!(link.wavelength_m > 0)) throw ValidationError("link budget: wavelength must be > 0");
    if (!(link.path_loss_factor >= 1)) throw ValidationError("link budget: path loss factor must be >= 1");
    if (!(link.tx_antenna_height_m > 0) || !(link.rx_antenna_height_m > 0)) {
        throw ValidationError("link budget: antenna heights must be > 0");
    }
}

kernels::PropagationCoefficients propagation_coefficients(const LinkBudget& link) {
    validate(link);
    kernels::PropagationCoefficients c;
    c.gain_power = link.tx_power_w * link.tx_gain * link.rx_gain;
    c.lambda_over_4pi = link.wavelength_m / (4.0 * std::numbers::pi);
    c.path_loss = link.path_loss_factor;
    c.two_ray = c.gain_power * (link.tx_antenna_height_m * link.tx_antenna_height_m) *
                (link.rx_antenna_height_m * link.rx_antenna_height_m);
    c.crossover = crossover_distance(link);
    return c;
}

PacketizationResult packetize(const ProtocolSpec& spec, std::int64_t data_bytes) {
    require_positive_size(data_bytes);
    PacketizationResult r;
    r.packet_count = (data_bytes + spec.max_payload_bytes - 1) / spec.max_payload_bytes;
    r.total_overhead_bytes = Rational(r.packet_count) * spec.overhead_bytes;
    r.total_on_air_bytes = Rational(data_bytes) + r.total_overhead_bytes;
    return r;
}

double transmission_time(const ProtocolSpec& spec, std::int64_t data_bytes, double propagation_time_s) {
    if (!(propagation_time_s >= 0)) throw DomainError("propagation time must be >= 0");
    const Rational on_air_bits = packetize(spec, data_bytes).total_on_air_bytes * Rational(8);
    return on_air_bits.to_double() * spec.bit_time_s() + propagation_time_s;
}

double coding_efficiency(const ProtocolSpec& spec, std::int64_t data_bytes) {
    const auto r = packetize(spec, data_bytes);
    return 100.0 * static_cast<double>(data_bytes) / r.total_on_air_bytes.to_double();
}

double friis_received_power(const LinkBudget& link, double distance_m) {
    require_positive_distance(distance_m);
    return kernels::friis_power(propagation_coefficients(link), distance_m);
}

double friis_range(const LinkBudget& link, double rx_sensitivity_w) {
    if (!(rx_sensitivity_w > 0)) throw DomainError("receiver sensitivity must be > 0 W");
    const auto c = propagation_coefficients(link);
    return c.lambda_over_4pi * std::sqrt(c.gain_power / rx_sensitivity_w);
}

double crossover_distance(const LinkBudget& link) {
    return 4.0 * std::numbers::pi * std::sqrt(link.path_loss_factor) * link.tx_antenna_height_m *
           link.rx_antenna_height_m / link.wavelength_m;
}

double received_power(const LinkBudget& link, double distance_m) {
    require_positive_distance(distance_m);
    return kernels::two_ray_power(propagation_coefficients(link), distance_m);
}

std::vector<double> received_power(const LinkBudget& link, std::span<const double> distances_m) {
    for (double d : distances_m) require_positive_distance(d);
    std::vector<double> out(distances_m.size());
    kernels::two_ray_power(propagation_coefficients(link), distances_m, out);
    return out;
}

double realtime_throughput(double data_bytes, double frame_time_s, double backoff_time_s) {
    if (!(data_bytes > 0)) throw DomainError("data amount must be > 0 bytes");
    if (!(frame_time_s > 0)) throw DomainError("frame time must be > 0 s");
    if (!(backoff_time_s >= 0)) throw DomainError("backoff time must be >= 0 s");
    return data_bytes / (frame_time_s + backoff_time_s);
}

}  // namespace wsnperf
