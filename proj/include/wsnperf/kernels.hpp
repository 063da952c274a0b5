#pragma once

// Data-parallel inner loops used by the Monte Carlo BER engine and by the
// distance sweeps. Every kernel has a scalar reference; the AVX2 variant is
// selected at runtime and must produce bit-identical output.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace wsnperf::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view text);

/// Whether this binary carries the variant and the CPU can run it.
bool isa_supported(Isa isa);

/// Best supported ISA, unless overridden by set_isa_override or the
/// WSNPERF_ISA environment variable ("scalar" or "avx2").
Isa active_isa();

/// Pins dispatch to `isa` (must be supported); nullopt restores auto-detection.
void set_isa_override(std::optional<Isa> isa);

/// Friis / two-ray received power, with coefficients folded once per link.
struct PropagationCoefficients {
    double gain_power = 0.0;       // P_t * G_t * G_r
    double lambda_over_4pi = 0.0;  // lambda / (4 pi)
    double path_loss = 1.0;        // L
    double two_ray = 0.0;          // P_t G_t G_r h_t^2 h_r^2
    double crossover = 0.0;        // d_c
};

inline double friis_power(const PropagationCoefficients& c, double d) noexcept {
    const double ratio = c.lambda_over_4pi / d;
    return c.gain_power * (ratio * ratio);
}

inline double two_ray_power(const PropagationCoefficients& c, double d) noexcept {
    if (d < c.crossover) return friis_power(c, d) / c.path_loss;
    const double d2 = d * d;
    return c.two_ray / (d2 * d2);
}

/// First-order radio model, per transmitted bit.
struct RadioEnergyCoefficients {
    double electronics = 0.0;  // E_elec, J/bit
    double free_space = 0.0;   // eps_fs, J/bit/m^2
    double multipath = 0.0;    // eps_amp, J/bit/m^4
    double threshold = 0.0;    // d_0
};

inline double radio_energy_per_bit(const RadioEnergyCoefficients& c, double d) noexcept {
    const double d2 = d * d;
    if (d < c.threshold) return c.free_space * d2 + c.electronics;
    return c.multipath * (d2 * d2) + c.electronics;
}

// Dispatched entry points. Output spans must be at least as long as inputs.

void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out);
void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out);

/// out[i] = signal[i] + sigma * noise[i]
void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out);
/// out[i] = re[i]^2 + im[i]^2
void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out);

/// bit = 1 where rx < 0 (bit 0 is sent as +a, bit 1 as -a).
void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits);
/// Gray 4-level slicer, two bits per sample: levels -3a,-a,+a,+3a carry 10,11,01,00.
/// `threshold` is the outer decision boundary 2a. bits.size() >= 2 * rx.size().
void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits);
/// bit = 1 where b[i] > a[i].
void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits);
/// Number of positions where a and b differ.
std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

namespace scalar {
void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out);
void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out);
void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out);
void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out);
void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits);
void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits);
void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits);
std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
}  // namespace scalar

#if defined(WSNPERF_HAVE_AVX2)
namespace avx2 {
void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out);
void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out);
void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out);
void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out);
void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits);
void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits);
void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits);
std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
}  // namespace avx2
#endif

}  // namespace wsnperf::kernels
