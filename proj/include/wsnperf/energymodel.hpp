#pragma once

#include <wsnperf/kernels.hpp>
#include <wsnperf/registry.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wsnperf {

/// First-order radio energy model. Defaults: 50 nJ/bit, 10 pJ/bit/m^2, 0.0013 pJ/bit/m^4.
struct RadioEnergyParams {
    double electronics_energy = 50e-9;
    double fs_amp_energy = 10e-12;
    double mp_amp_energy = 0.0013e-12;
};

void validate(const RadioEnergyParams& params);
kernels::RadioEnergyCoefficients radio_energy_coefficients(const RadioEnergyParams& params);

/// Distance at which the amplifier exponent switches from 2 to 4, sqrt(eps_fs / eps_amp).
double threshold_distance(const RadioEnergyParams& params);

/// Energy to send `k_bits` over `distance_m`, joules.
double tx_energy(const RadioEnergyParams& params, std::int64_t k_bits, double distance_m);
std::vector<double> tx_energy(const RadioEnergyParams& params, std::int64_t k_bits,
                              std::span<const double> distances_m);

enum class Direction { tx, rx };

/// V_DD * I, watts.
double chipset_power(const ChipsetSpec& chipset, Direction direction);

/// Energy to move one megabit, mJ/Mb.
double normalized_energy(const ChipsetSpec& chipset, Direction direction);

/// Per-attempt energies of one packet. Defaults: O = 2 bytes, e_t = 100 nJ, e_m = 200 nJ, e_c = 100 nJ.
struct EnergyIndexParams {
    double packet_overhead_bits = 16.0;
    double transceiver_energy = 100e-9;
    double medium_energy = 200e-9;
    double processing_energy = 100e-9;

    double attempt_energy() const noexcept { return transceiver_energy + medium_energy + processing_energy; }
};

void validate(const EnergyIndexParams& params);

/// Useful bits per joule, (L - O) / ((1 + n_r)(e_t + e_m + e_c)).
///
/// Without `retransmissions` the expected attempt count 1 + n_r is taken
/// as 1 / (1 - p_e), with p_e the packet error probability of an L-bit
/// packet at `bit_error_prob`. That is what gives the index an interior
/// maximum in L. Passing a fixed `retransmissions` evaluates the formula
/// literally with a constant n_r.
double energy_index(double packet_length_bits, double bit_error_prob, const EnergyIndexParams& params,
                    std::optional<double> retransmissions = std::nullopt);

/// Integer L > O maximizing energy_index (smallest L on ties).
std::int64_t optimal_packet_length(double bit_error_prob, double overhead_bits);

/// Real-valued stationary point O - 1 / ln(1 - b_e).
double optimal_packet_length_continuous(double bit_error_prob, double overhead_bits);

/// MCU switching/leakage model. Defaults are illustrative, not measured.
struct McuParams {
    double supply_voltage = 3.0;                       // V_dd, V
    double switched_capacitance_per_cycle = 0.67e-9;   // C, F
    double leakage_current_scale = 1.196e-3;           // I_0, A
    double process_constant = 21.26;                   // n
    double thermal_voltage = 0.026;                    // V_T at 300 K, V
    double clock_frequency = 100e6;                    // f, Hz
};

void validate(const McuParams& params);

struct McuEnergy {
    double switching = 0.0;
    double leakage = 0.0;
    double total = 0.0;
};

/// E_switch = N C V_dd^2, E_leak = V_dd I_0 exp(V_dd / (n V_T)) N / f.
McuEnergy mcu_energy(const McuParams& params, std::int64_t cycles);

}  // namespace wsnperf
