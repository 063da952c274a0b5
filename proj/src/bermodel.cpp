#include <wsnperf/bermodel.hpp>
#include <wsnperf/error.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace wsnperf {

namespace {

constexpr double kPi = std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Mean Hamming distance between Gray labels of 8-ary phase positions d steps apart.
constexpr std::array<double, 8> gray8_distance_weights() {
    std::array<double, 8> w{};
    for (int d = 0; d < 8; ++d) {
        int total = 0;
        for (int k = 0; k < 8; ++k) {
            const int a = k ^ (k >> 1);
            const int b = ((k + d) % 8) ^ (((k + d) % 8) >> 1);
            total += __builtin_popcount(static_cast<unsigned>(a ^ b));
        }
        w[d] = total / 8.0;
    }
    return w;
}

/// ln P(phase difference > psi) for differential detection of two
/// equal-SNR noisy phasors, psi in (0, pi). Pawula's single integral, with
/// the Gaussian peak factored out so it stays finite at any SNR.
double log_phase_difference_tail(double psi, double symbol_snr) {
    const double c = std::cos(psi);
    const double floor_exponent = c > 0 ? 1.0 - c : 1.0;
    const auto integrand = [&](double t) {
        const double s = std::sin(0.5 * t);
        const double excess = c > 0 ? 2.0 * c * s * s : -c * std::cos(t);
        return std::exp(-symbol_snr * excess) / (1.0 - c * std::cos(t));
    };
    // Clip to where the exponent stays above about -700, so the peak is resolved at any SNR.
    double lo = 0.0;
    double hi = kPi / 2;
    if (c > 0) {
        hi = std::min(hi, 60.0 / std::sqrt(symbol_snr * c));
    } else if (c < 0) {
        lo = std::max(lo, kPi / 2 - 1200.0 / (symbol_snr * -c));
    }
    const double integral =
        2.0 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 20, 1e-13);
    return std::log(std::sin(psi) / (4.0 * kPi)) - symbol_snr * floor_exponent + std::log(integral);
}

/// ln P(phase error > psi) on one side for a coherent phasor, psi in (0, pi).
/// Craig's integral with exp(-snr sin^2 psi) factored out, in v = sqrt(a) cot(phi).
double log_coherent_phase_tail(double psi, double symbol_snr) {
    const double s2 = std::sin(psi) * std::sin(psi);
    const double a = symbol_snr * s2;
    const double root = std::sqrt(a);
    const double v0 = -root * std::cos(psi) / std::sin(psi);
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    double log_integral = 0.0;
    if (v0 < 0) {
        const auto f = [&](double v) { return std::exp(-v * v) / (1.0 + v * v / a); };
        log_integral = std::log(gk::integrate(f, std::max(v0, -40.0), 40.0, 20, 1e-13));
    } else {
        // v = v0 + w with exp(-v0^2) pulled out
        const auto f = [&](double w) {
            const double v = v0 + w;
            return std::exp(-w * (2.0 * v0 + w)) / (1.0 + v * v / a);
        };
        const double hi = v0 > 10.0 ? 400.0 / v0 : 40.0;
        log_integral = -v0 * v0 + std::log(gk::integrate(f, 0.0, hi, 20, 1e-13));
    }
    return -std::log(2.0 * kPi) - a + log_integral - std::log(root);
}

/// Gray-coded 8-ary phase BER, natural log, from one-sided tails at the
/// decision boundaries (2j-1) pi / 8, j = 1..4.
template <class Tail>
double log_ber_phase8(Tail&& log_tail_at) {
    static constexpr auto w = gray8_distance_weights();
    std::array<double, 5> log_tail{};
    for (int j = 1; j <= 4; ++j) log_tail[j] = log_tail_at((2 * j - 1) * kPi / 8.0);
    std::array<double, 5> ratio{};  // tail_j / tail_1
    for (int j = 1; j <= 4; ++j) ratio[j] = std::exp(log_tail[j] - log_tail[1]);
    // Offsets d and 8-d are equally likely; offset 4 collects both far tails.
    double sum = 0.0;
    for (int d = 1; d <= 3; ++d) sum += 2.0 * w[d] * (ratio[d] - ratio[d + 1]);
    sum += 2.0 * w[4] * ratio[4];
    return log_tail[1] + std::log(sum / 3.0);
}

/// Gray 4-PAM per rail, exact: (3 Q(a) + 2 Q(3a) - Q(5a)) / 4, a = sqrt(0.8 gamma).
double log_ber_pam4(double gamma) {
    const double a = std::sqrt(0.8 * gamma);
    const double lq = log_q_function(a);
    const double r3 = std::exp(log_q_function(3.0 * a) - lq);
    const double r5 = std::exp(log_q_function(5.0 * a) - lq);
    return std::log(0.75) + lq + std::log1p((2.0 * r3 - r5) / 3.0);
}

double log_ber_psk8(double gamma) {
    return log_ber_phase8([&](double psi) { return log_coherent_phase_tail(psi, 3.0 * gamma); });
}

double log_ber_dpsk8(double gamma) {
    return log_ber_phase8([&](double psi) { return log_phase_difference_tail(psi, 3.0 * gamma); });
}

std::string lowercase(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (ch == '-' || ch == '_' || ch == ' ' || ch == '/') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::BPSK_QPSK_OQPSK: return "BPSK_QPSK_OQPSK";
        case Scheme::GMSK: return "GMSK";
        case Scheme::FSK: return "FSK";
        case Scheme::GFSK: return "GFSK";
        case Scheme::PSK8: return "PSK8";
        case Scheme::DPSK8: return "DPSK8";
        case Scheme::PAM4: return "PAM4";
        case Scheme::QAM16: return "QAM16";
        case Scheme::OFDM: return "OFDM";
    }
    return "?";
}

Scheme parse_scheme(std::string_view text) {
    const std::string key = lowercase(text);
    if (key == "bpskqpskoqpsk" || key == "bpsk" || key == "qpsk" || key == "oqpsk" || key == "boqqpsk") {
        return Scheme::BPSK_QPSK_OQPSK;
    }
    if (key == "gmsk") return Scheme::GMSK;
    if (key == "fsk") return Scheme::FSK;
    if (key == "gfsk") return Scheme::GFSK;
    if (key == "psk8" || key == "8psk") return Scheme::PSK8;
    if (key == "dpsk8" || key == "8dpsk") return Scheme::DPSK8;
    if (key == "pam4" || key == "4pam") return Scheme::PAM4;
    if (key == "qam16" || key == "16qam") return Scheme::QAM16;
    if (key == "ofdm") return Scheme::OFDM;
    std::string names;
    for (Scheme s : kAllSchemes) {
        if (!names.empty()) names += ", ";
        names += to_string(s);
    }
    throw UnknownNameError("unknown modulation '" + std::string(text) + "'; available: " + names);
}

void validate(const Modulation& mod) {
    if (!(mod.gmsk_alpha > 0) || !(mod.gmsk_alpha <= 1)) throw ValidationError("GMSK alpha must be in (0, 1]");
    if (mod.ofdm_subcarrier == Scheme::OFDM) throw ValidationError("OFDM subcarrier scheme cannot be OFDM");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_q_function(double x) {
    if (x < 30.0) return std::log(q_function(x));
    // Asymptotic expansion; the next term is below 1e-13 relative at x = 30.
    const double inv2 = 1.0 / (x * x);
    const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2 * (1.0 - 9.0 * inv2))));
    return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

double log_ber_analytic(const Modulation& mod, double eb_n0_db) {
    validate(mod);
    if (!std::isfinite(eb_n0_db)) throw DomainError("Eb/N0 must be finite");
    const double gamma = db_to_linear(eb_n0_db);
    switch (mod.scheme) {
        case Scheme::BPSK_QPSK_OQPSK: return log_q_function(std::sqrt(2.0 * gamma));
        case Scheme::GMSK: return log_q_function(std::sqrt(2.0 * mod.gmsk_alpha * gamma));
        case Scheme::FSK: return log_q_function(std::sqrt(gamma));
        case Scheme::GFSK: return std::log(0.5) - 0.5 * gamma;
        case Scheme::PSK8: return log_ber_psk8(gamma);
        case Scheme::DPSK8: return log_ber_dpsk8(gamma);
        case Scheme::PAM4:
        case Scheme::QAM16: return log_ber_pam4(gamma);
        case Scheme::OFDM: {
            Modulation sub = mod;
            sub.scheme = mod.ofdm_subcarrier;
            return log_ber_analytic(sub, eb_n0_db);
        }
    }
    throw DomainError("unhandled modulation");
}

double ber_analytic(const Modulation& mod, double eb_n0_db) {
    validate(mod);
    if (!std::isfinite(eb_n0_db)) throw DomainError("Eb/N0 must be finite");
    const double gamma = db_to_linear(eb_n0_db);
    switch (mod.scheme) {
        case Scheme::BPSK_QPSK_OQPSK: return q_function(std::sqrt(2.0 * gamma));
        case Scheme::GMSK: return q_function(std::sqrt(2.0 * mod.gmsk_alpha * gamma));
        case Scheme::FSK: return q_function(std::sqrt(gamma));
        case Scheme::GFSK: return 0.5 * std::exp(-0.5 * gamma);
        case Scheme::PSK8: return std::min(0.5, std::exp(log_ber_psk8(gamma)));
        case Scheme::DPSK8: return std::min(0.5, std::exp(log_ber_dpsk8(gamma)));
        case Scheme::PAM4:
        case Scheme::QAM16: return std::exp(log_ber_pam4(gamma));
        case Scheme::OFDM: {
            Modulation sub = mod;
            sub.scheme = mod.ofdm_subcarrier;
            return ber_analytic(sub, eb_n0_db);
        }
    }
    throw DomainError("unhandled modulation");
}

double required_ebn0(const Modulation& mod, double target_ber) {
    if (!(target_ber > 0) || !(target_ber < 0.5)) throw DomainError("target BER must be in (0, 0.5)");
    const double log_target = std::log(target_ber);
    const auto excess = [&](double db) { return log_ber_analytic(mod, db) - log_target; };
    double lo = -20.0;
    double hi = 60.0;
    while (excess(lo) <= 0) {
        lo -= 40.0;
        if (lo < -400.0) throw DomainError("target BER not reachable at any Eb/N0");
    }
    while (excess(hi) > 0) {
        hi += 40.0;
        if (hi > 400.0) throw DomainError("target BER not reachable at any Eb/N0");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double packet_error_probability(double bit_error_prob, double packet_length_bits) {
    if (!(bit_error_prob >= 0) || !(bit_error_prob <= 1)) throw DomainError("bit error probability must be in [0, 1]");
    if (!(packet_length_bits >= 1)) throw DomainError("packet length must be >= 1 bit");
    if (bit_error_prob == 1.0) return 1.0;
    return -std::expm1(packet_length_bits * std::log1p(-bit_error_prob));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace wsnperf
