#include <wsnperf/kernels.hpp>

#include <cmath>

namespace wsnperf::kernels::scalar {

void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out) {
    for (std::size_t i = 0; i < distance.size(); ++i) out[i] = kernels::two_ray_power(c, distance[i]);
}

void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out) {
    for (std::size_t i = 0; i < distance.size(); ++i) out[i] = bits * radio_energy_per_bit(c, distance[i]);
}

void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out) {
    for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] + sigma * noise[i];
}

void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out) {
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits) {
    for (std::size_t i = 0; i < rx.size(); ++i) bits[i] = rx[i] < 0.0 ? 1 : 0;
}

void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits) {
    for (std::size_t i = 0; i < rx.size(); ++i) {
        bits[2 * i] = rx[i] < 0.0 ? 1 : 0;
        bits[2 * i + 1] = std::fabs(rx[i]) < threshold ? 1 : 0;
    }
}

void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits) {
    for (std::size_t i = 0; i < a.size(); ++i) bits[i] = b[i] > a[i] ? 1 : 0;
}

std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i] ? 1 : 0;
    return count;
}

}  // namespace wsnperf::kernels::scalar
