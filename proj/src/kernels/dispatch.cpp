#include <wsnperf/error.hpp>
#include <wsnperf/kernels.hpp>

#include <atomic>
#include <cstdlib>
#include <string>

namespace wsnperf::kernels {

namespace {

constexpr int kAuto = -1;
std::atomic<int> g_override{kAuto};

bool cpu_has_avx2() {
#if defined(WSNPERF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect() {
    static const Isa detected = [] {
        if (const char* env = std::getenv("WSNPERF_ISA")) {
            if (auto isa = parse_isa(env); isa && isa_supported(*isa)) return *isa;
        }
        return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
    }();
    return detected;
}

void check_sizes(std::size_t in, std::size_t out) {
    if (out < in) throw DomainError("kernel output span shorter than input");
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "scalar";
}

std::optional<Isa> parse_isa(std::string_view text) {
    if (text == "scalar") return Isa::scalar;
    if (text == "avx2") return Isa::avx2;
    return std::nullopt;
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return cpu_has_avx2();
    }
    return false;
}

Isa active_isa() {
    const int forced = g_override.load(std::memory_order_relaxed);
    return forced == kAuto ? detect() : static_cast<Isa>(forced);
}

void set_isa_override(std::optional<Isa> isa) {
    if (isa && !isa_supported(*isa)) {
        throw DomainError("ISA '" + std::string(to_string(*isa)) + "' is not available on this machine");
    }
    g_override.store(isa ? static_cast<int>(*isa) : kAuto, std::memory_order_relaxed);
}

#if defined(WSNPERF_HAVE_AVX2)
#define WSNPERF_DISPATCH(fn, ...)                                    \
    do {                                                             \
        if (active_isa() == Isa::avx2) return avx2::fn(__VA_ARGS__); \
        return scalar::fn(__VA_ARGS__);                              \
    } while (0)
#else
#define WSNPERF_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void two_ray_power(const PropagationCoefficients& c, std::span<const double> distance, std::span<double> out) {
    check_sizes(distance.size(), out.size());
    WSNPERF_DISPATCH(two_ray_power, c, distance, out);
}

void radio_energy(const RadioEnergyCoefficients& c, double bits, std::span<const double> distance,
                  std::span<double> out) {
    check_sizes(distance.size(), out.size());
    WSNPERF_DISPATCH(radio_energy, c, bits, distance, out);
}

void add_scaled(std::span<const double> signal, std::span<const double> noise, double sigma, std::span<double> out) {
    check_sizes(signal.size(), noise.size());
    check_sizes(signal.size(), out.size());
    WSNPERF_DISPATCH(add_scaled, signal, noise, sigma, out);
}

void squared_magnitude(std::span<const double> re, std::span<const double> im, std::span<double> out) {
    check_sizes(re.size(), im.size());
    check_sizes(re.size(), out.size());
    WSNPERF_DISPATCH(squared_magnitude, re, im, out);
}

void slice_antipodal(std::span<const double> rx, std::span<std::uint8_t> bits) {
    check_sizes(rx.size(), bits.size());
    WSNPERF_DISPATCH(slice_antipodal, rx, bits);
}

void slice_pam4_gray(std::span<const double> rx, double threshold, std::span<std::uint8_t> bits) {
    check_sizes(2 * rx.size(), bits.size());
    WSNPERF_DISPATCH(slice_pam4_gray, rx, threshold, bits);
}

void slice_greater(std::span<const double> a, std::span<const double> b, std::span<std::uint8_t> bits) {
    check_sizes(a.size(), b.size());
    check_sizes(a.size(), bits.size());
    WSNPERF_DISPATCH(slice_greater, a, b, bits);
}

std::uint64_t count_mismatches(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    check_sizes(a.size(), b.size());
    WSNPERF_DISPATCH(count_mismatches, a, b);
}

#undef WSNPERF_DISPATCH

}  // namespace wsnperf::kernels
