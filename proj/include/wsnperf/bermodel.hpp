#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsnperf {

enum class Scheme {
    BPSK_QPSK_OQPSK,
    GMSK,
    FSK,
    GFSK,
    PSK8,
    DPSK8,
    PAM4,
    QAM16,
    OFDM,
};

inline constexpr Scheme kAllSchemes[] = {Scheme::BPSK_QPSK_OQPSK, Scheme::GMSK, Scheme::FSK,
                                         Scheme::GFSK,            Scheme::PSK8, Scheme::DPSK8,
                                         Scheme::PAM4,            Scheme::QAM16, Scheme::OFDM};

std::string_view to_string(Scheme scheme);
/// Accepts the canonical names plus common spellings ("qpsk", "8psk", "16qam", ...).
Scheme parse_scheme(std::string_view text);

struct Modulation {
    Scheme scheme = Scheme::BPSK_QPSK_OQPSK;
    double gmsk_alpha = 0.68;                    // GMSK energy degradation, BT = 0.25
    Scheme ofdm_subcarrier = Scheme::QAM16;

    Modulation() = default;
    Modulation(Scheme s) : scheme(s) {}  // NOLINT(google-explicit-constructor)
};

void validate(const Modulation& mod);

/// Gaussian tail probability.
double q_function(double x);
/// ln Q(x), accurate far into the tail where Q underflows.
double log_q_function(double x);

/// Closed-form AWGN bit error probability.
double ber_analytic(const Modulation& mod, double eb_n0_db);

/// ln of ber_analytic, finite for any finite Eb/N0.
double log_ber_analytic(const Modulation& mod, double eb_n0_db);

/// Eb/N0 (dB) at which ber_analytic equals `target_ber`, to 1e-6 relative.
double required_ebn0(const Modulation& mod, double target_ber);

/// 1 - (1 - b_e)^L without cancellation for small b_e.
double packet_error_probability(double bit_error_prob, double packet_length_bits);

enum class BerSource { analytic, monte_carlo };

struct BerSample {
    double eb_n0_db = 0.0;
    double ber = 0.0;
    BerSource source = BerSource::analytic;
    std::uint64_t trial_bits = 0;
    std::uint64_t error_bits = 0;
};

struct MonteCarloOptions {
    /// Worker threads; 0 picks std::thread::hardware_concurrency(). Never changes the result.
    unsigned threads = 0;
};

/// Bits per independently seeded block of the Monte Carlo run.
inline constexpr std::uint64_t kMonteCarloBlockBits = 1u << 15;

/// Gray-mapped symbols through AWGN with ML (or differential) detection.
/// Deterministic in (mod, eb_n0_db, n_bits, seed).
BerSample ber_monte_carlo(const Modulation& mod, double eb_n0_db, std::uint64_t n_bits, std::uint64_t seed,
                          const MonteCarloOptions& options = {});

/// Mixes a seed with a stream index (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace wsnperf
