// Compiled with -mavx2 (and without -mfma): every lane performs the same
// IEEE operations, in the same order, as the scalar reference.

#include <wsnperf/kernels.hpp>

#include <immintrin.h>

#include <bit>
#include <cstring>

namespace wsnperf::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline void store_mask_bytes(int mask, std::uint8_t* dst) {
    for (std::size_t j = 0; j < kLanes; ++j) dst[j] = static_cast<std::uint8_t>((mask >> j) & 1);
}

}  // namespace

void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out) {
    const __m256d gain_power = _mm256_set1_pd(c.gain_power);
    const __m256d l4pi = _mm256_set1_pd(c.lambda_over_4pi);
    const __m256d loss = _mm256_set1_pd(c.path_loss);
    const __m256d two_ray = _mm256_set1_pd(c.two_ray);
    const __m256d crossover = _mm256_set1_pd(c.crossover);
    std::size_t i = 0;
    for (; i + kLanes <= distance.size(); i += kLanes) {
        const __m256d d = _mm256_loadu_pd(distance.data() + i);
        const __m256d ratio = _mm256_div_pd(l4pi, d);
        const __m256d friis = _mm256_mul_pd(gain_power, _mm256_mul_pd(ratio, ratio));
        const __m256d free_space = _mm256_div_pd(friis, loss);
        const __m256d d2 = _mm256_mul_pd(d, d);
        const __m256d ground = _mm256_div_pd(two_ray, _mm256_mul_pd(d2, d2));
        const __m256d near = _mm256_cmp_pd(d, crossover, _CMP_LT_OQ);
        _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(ground, free_space, near));
    }
    for (; i < distance.size(); ++i) out[i] = kernels::two_ray_power(c, distance[i]);
}

void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out) {
    const __m256d elec = _mm256_set1_pd(c.electronics);
    const __m256d fs = _mm256_set1_pd(c.free_space);
    const __m256d mp = _mm256_set1_pd(c.multipath);
    const __m256d threshold = _mm256_set1_pd(c.threshold);
    const __m256d k = _mm256_set1_pd(bits);
    std::size_t i = 0;
    for (; i + kLanes <= distance.size(); i += kLanes) {
        const __m256d d = _mm256_loadu_pd(distance.data() + i);
        const __m256d d2 = _mm256_mul_pd(d, d);
        const __m256d short_range = _mm256_add_pd(_mm256_mul_pd(fs, d2), elec);
        const __m256d long_range = _mm256_add_pd(_mm256_mul_pd(mp, _mm256_mul_pd(d2, d2)), elec);
        const __m256d near = _mm256_cmp_pd(d, threshold, _CMP_LT_OQ);
        const __m256d per_bit = _mm256_blendv_pd(long_range, short_range, near);
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(k, per_bit));
    }
    for (; i < distance.size(); ++i) out[i] = bits * radio_energy_per_bit(c, distance[i]);
}

void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out) {
    const __m256d s = _mm256_set1_pd(sigma);
    std::size_t i = 0;
    for (; i + kLanes <= signal.size(); i += kLanes) {
        const __m256d x = _mm256_loadu_pd(signal.data() + i);
        const __m256d n = _mm256_loadu_pd(noise.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(x, _mm256_mul_pd(s, n)));
    }
    for (; i < signal.size(); ++i) out[i] = signal[i] + sigma * noise[i];
}

void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out) {
    std::size_t i = 0;
    for (; i + kLanes <= re.size(); i += kLanes) {
        const __m256d a = _mm256_loadu_pd(re.data() + i);
        const __m256d b = _mm256_loadu_pd(im.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
    }
    for (; i < re.size(); ++i) out[i] = re[i] * re[i] + im[i] * im[i];
}

void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= rx.size(); i += kLanes) {
        const __m256d x = _mm256_loadu_pd(rx.data() + i);
        store_mask_bytes(_mm256_movemask_pd(_mm256_cmp_pd(x, zero, _CMP_LT_OQ)), bits.data() + i);
    }
    for (; i < rx.size(); ++i) bits[i] = rx[i] < 0.0 ? 1 : 0;
}

void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign_bit = _mm256_set1_pd(-0.0);
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t i = 0;
    for (; i + kLanes <= rx.size(); i += kLanes) {
        const __m256d x = _mm256_loadu_pd(rx.data() + i);
        const int negative = _mm256_movemask_pd(_mm256_cmp_pd(x, zero, _CMP_LT_OQ));
        const __m256d magnitude = _mm256_andnot_pd(sign_bit, x);
        const int inner = _mm256_movemask_pd(_mm256_cmp_pd(magnitude, t, _CMP_LT_OQ));
        std::uint8_t* dst = bits.data() + 2 * i;
        for (std::size_t j = 0; j < kLanes; ++j) {
            dst[2 * j] = static_cast<std::uint8_t>((negative >> j) & 1);
            dst[2 * j + 1] = static_cast<std::uint8_t>((inner >> j) & 1);
        }
    }
    for (; i < rx.size(); ++i) {
        bits[2 * i] = rx[i] < 0.0 ? 1 : 0;
        bits[2 * i + 1] = (rx[i] < 0.0 ? -rx[i] : rx[i]) < threshold ? 1 : 0;
    }
}

void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits) {
    std::size_t i = 0;
    for (; i + kLanes <= a.size(); i += kLanes) {
        const __m256d x = _mm256_loadu_pd(a.data() + i);
        const __m256d y = _mm256_loadu_pd(b.data() + i);
        store_mask_bytes(_mm256_movemask_pd(_mm256_cmp_pd(y, x, _CMP_GT_OQ)), bits.data() + i);
    }
    for (; i < a.size(); ++i) bits[i] = b[i] > a[i] ? 1 : 0;
}

std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    constexpr std::size_t kBytes = 32;
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (; i + kBytes <= a.size(); i += kBytes) {
        const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
        const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
        const auto equal = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, y)));
        count += static_cast<std::uint64_t>(std::popcount(~equal));
    }
    for (; i < a.size(); ++i) count += a[i] != b[i] ? 1 : 0;
    return count;
}

}  // namespace wsnperf::kernels::avx2
