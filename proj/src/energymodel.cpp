#include <wsnperf/error.hpp>
#include <wsnperf/energymodel.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace wsnperf {

void validate(const RadioEnergyParams& p) {
    if (!(p.electronics_energy > 0) || !(p.fs_amp_energy > 0) || !(p.mp_amp_energy > 0)) {
        throw ValidationError("radio energy parameters must all be > 0");
    }
}

kernels::RadioEnergyCoefficients radio_energy_coefficients(const RadioEnergyParams& p) {
    validate(p);
    return {p.electronics_energy, p.fs_amp_energy, p.mp_amp_energy, threshold_distance(p)};
}

double threshold_distance(const RadioEnergyParams& p) {
    validate(p);
    return std::sqrt(p.fs_amp_energy / p.mp_amp_energy);
}

double tx_energy(const RadioEnergyParams& p, std::int64_t k_bits, double distance_m) {
    if (k_bits < 1) throw DomainError("message must carry >= 1 bit");
    if (!(distance_m >= 0)) throw DomainError("distance must be >= 0 m");
    return static_cast<double>(k_bits) * kernels::radio_energy_per_bit(radio_energy_coefficients(p), distance_m);
}

std::vector<double> tx_energy(const RadioEnergyParams& p, std::int64_t k_bits, std::span<const double> distances_m) {
    if (k_bits < 1) throw DomainError("message must carry >= 1 bit");
    for (double d : distances_m) {
        if (!(d >= 0)) throw DomainError("distance must be >= 0 m");
    }
    std::vector<double> out(distances_m.size());
    kernels::radio_energy(radio_energy_coefficients(p), static_cast<double>(k_bits), distances_m, out);
    return out;
}

double chipset_power(const ChipsetSpec& chipset, Direction direction) {
    const double current_ma = direction == Direction::tx ? chipset.tx_current_ma : chipset.rx_current_ma;
    return chipset.supply_voltage_v * current_ma / 1000.0;
}

double normalized_energy(const ChipsetSpec& chipset, Direction direction) {
    if (!(chipset.bit_rate_mbps > 0)) throw DomainError("chipset bit rate must be > 0");
    // W / (Mb/s) = J/Mb; x1000 for mJ/Mb.
    return chipset_power(chipset, direction) * 1000.0 / chipset.bit_rate_mbps;
}

void validate(const EnergyIndexParams& p) {
    if (!(p.packet_overhead_bits >= 0)) throw ValidationError("packet overhead must be >= 0 bits");
    if (!(p.transceiver_energy > 0) || !(p.medium_energy > 0) || !(p.processing_energy > 0)) {
        throw ValidationError("energy index energies must all be > 0");
    }
}

double energy_index(double packet_length_bits, double bit_error_prob, const EnergyIndexParams& params,
                    std::optional<double> retransmissions) {
    validate(params);
    if (!(packet_length_bits > params.packet_overhead_bits)) {
        throw DomainError("packet length must exceed the overhead (" + std::to_string(params.packet_overhead_bits) +
                          " bits)");
    }
    if (!(bit_error_prob >= 0) || !(bit_error_prob < 1)) throw DomainError("bit error probability must be in [0, 1)");
    const double payload = packet_length_bits - params.packet_overhead_bits;
    if (retransmissions) {
        if (!(*retransmissions >= 0)) throw DomainError("retransmission count must be >= 0");
        return payload / ((1.0 + *retransmissions) * params.attempt_energy());
    }
    // 1 / (1 + n_r) = 1 - p_e = (1 - b_e)^L
    const double success = std::exp(packet_length_bits * std::log1p(-bit_error_prob));
    return payload * success / params.attempt_energy();
}

double optimal_packet_length_continuous(double bit_error_prob, double overhead_bits) {
    if (!(bit_error_prob > 0) || !(bit_error_prob < 1)) throw DomainError("bit error probability must be in (0, 1)");
    if (!(overhead_bits >= 0)) throw DomainError("overhead must be >= 0 bits");
    return overhead_bits - 1.0 / std::log1p(-bit_error_prob);
}

std::int64_t optimal_packet_length(double bit_error_prob, double overhead_bits) {
    const double stationary = optimal_packet_length_continuous(bit_error_prob, overhead_bits);
    // ln E_i is concave in L, so the integer optimum is a neighbour of the stationary point.
    const auto smallest = static_cast<std::int64_t>(std::floor(overhead_bits)) + 1;
    EnergyIndexParams params;
    params.packet_overhead_bits = overhead_bits;
    std::int64_t best = 0;
    double best_value = -1.0;
    const auto lo = std::max(smallest, static_cast<std::int64_t>(std::floor(stationary)));
    const auto hi = std::max(smallest, static_cast<std::int64_t>(std::ceil(stationary)));
    for (std::int64_t length = lo; length <= hi; ++length) {
        const double value = energy_index(static_cast<double>(length), bit_error_prob, params);
        if (value > best_value) {
            best_value = value;
            best = length;
        }
    }
    return best;
}

void validate(const McuParams& p) {
    if (!(p.supply_voltage > 0) || !(p.switched_capacitance_per_cycle > 0) || !(p.leakage_current_scale > 0) ||
        !(p.process_constant > 0) || !(p.thermal_voltage > 0) || !(p.clock_frequency > 0)) {
        throw ValidationError("MCU parameters must all be > 0");
    }
}

McuEnergy mcu_energy(const McuParams& p, std::int64_t cycles) {
    validate(p);
    if (cycles < 0) throw DomainError("cycle count must be >= 0");
    const double n = static_cast<double>(cycles);
    const double vdd = p.supply_voltage;
    McuEnergy e;
    e.switching = (n * p.switched_capacitance_per_cycle) * (vdd * vdd);
    e.leakage = vdd * (p.leakage_current_scale * std::exp(vdd / (p.process_constant * p.thermal_voltage))) *
                (n / p.clock_frequency);
    e.total = e.switching + e.leakage;
    return e;
}

}  // namespace wsnperf
