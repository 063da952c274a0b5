// Seeded AWGN Monte Carlo. Bits are split into fixed-size blocks, each
// driven by its own generator seeded from (seed, block index), so the error
// count does not depend on how blocks are spread across threads.

#include "parallel.hpp"

#include <wsnperf/bermodel.hpp>
#include <wsnperf/error.hpp>
#include <wsnperf/kernels.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace wsnperf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kOfdmSubcarriers = 64;

using Complex = std::complex<double>;

constexpr unsigned gray(unsigned k) { return k ^ (k >> 1); }

constexpr std::array<unsigned, 8> inverse_gray8() {
    std::array<unsigned, 8> inv{};
    for (unsigned k = 0; k < 8; ++k) inv[gray(k)] = k;
    return inv;
}

/// Unit-energy 8-ary phase points, indexed by phase position.
const std::array<Complex, 8>& phase_points8() {
    static const std::array<Complex, 8> points = [] {
        std::array<Complex, 8> p{};
        for (int k = 0; k < 8; ++k) p[k] = std::polar(1.0, k * kPi / 4.0);
        return p;
    }();
    return points;
}

unsigned nearest_phase8(double angle) {
    const long k = std::lround(angle / (kPi / 4.0));
    return static_cast<unsigned>(((k % 8) + 8) % 8);
}

/// In-place unitary radix-2 DFT; `inverse` flips the twiddle sign.
void unitary_fft(std::span<Complex> x, bool inverse) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, angle * static_cast<double>(k));
                const Complex u = x[start + k];
                const Complex v = x[start + k + len / 2] * w;
                x[start + k] = u + v;
                x[start + k + len / 2] = u - v;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : x) v *= scale;
}

class Block {
public:
    Block(std::uint64_t seed, double sigma) : rng_(seed), sigma_(sigma) {}

    /// Bit errors among the first `bits` bits of one block.
    std::uint64_t run(const Modulation& mod, std::size_t bits) {
        switch (mod.scheme) {
            case Scheme::BPSK_QPSK_OQPSK: return antipodal(bits, 1.0);
            case Scheme::GMSK: return antipodal(bits, std::sqrt(mod.gmsk_alpha));
            case Scheme::FSK: return coherent_fsk(bits);
            case Scheme::GFSK: return noncoherent_fsk(bits);
            case Scheme::PSK8: return psk8(bits);
            case Scheme::DPSK8: return dpsk8(bits);
            case Scheme::PAM4:
            case Scheme::QAM16: return pam4_rails(bits);
            case Scheme::OFDM: return ofdm(mod, bits);
        }
        throw DomainError("unhandled modulation");
    }

private:
    void random_bits(std::size_t count) {
        tx_.resize(count);
        for (std::size_t i = 0; i < count; i += 64) {
            const std::uint64_t word = rng_();
            for (std::size_t j = 0; j < 64 && i + j < count; ++j) tx_[i + j] = static_cast<std::uint8_t>((word >> j) & 1);
        }
    }

    /// out = clean + sigma * N(0, 1) per real dimension.
    void channel(std::span<const double> clean, std::vector<double>& out) {
        noise_.resize(clean.size());
        for (auto& v : noise_) v = gauss_(rng_);
        out.resize(clean.size());
        kernels::add_scaled(clean, noise_, sigma_, out);
    }

    std::uint64_t count(std::size_t bits) {
        return kernels::count_mismatches(std::span(tx_).first(bits), std::span(rx_).first(bits));
    }

    std::uint64_t antipodal(std::size_t bits, double amplitude) {
        random_bits(bits);
        clean_.resize(bits);
        for (std::size_t i = 0; i < bits; ++i) clean_[i] = tx_[i] ? -amplitude : amplitude;
        channel(clean_, rx_a_);
        rx_.resize(bits);
        kernels::slice_antipodal(rx_a_, rx_);
        return count(bits);
    }

    // Orthogonal tones, one real correlator each; decide the larger.
    std::uint64_t coherent_fsk(std::size_t bits) {
        random_bits(bits);
        clean_.resize(bits);
        for (std::size_t i = 0; i < bits; ++i) clean_[i] = tx_[i] ? 0.0 : 1.0;
        channel(clean_, rx_a_);
        for (std::size_t i = 0; i < bits; ++i) clean_[i] = tx_[i] ? 1.0 : 0.0;
        channel(clean_, rx_b_);
        rx_.resize(bits);
        kernels::slice_greater(rx_a_, rx_b_, rx_);
        return count(bits);
    }

    // Envelope detection of orthogonal tones with complex noise.
    std::uint64_t noncoherent_fsk(std::size_t bits) {
        random_bits(bits);
        std::array<std::vector<double>, 2> energy;
        for (unsigned tone = 0; tone < 2; ++tone) {
            clean_.resize(bits);
            for (std::size_t i = 0; i < bits; ++i) clean_[i] = tx_[i] == tone ? 1.0 : 0.0;
            channel(clean_, rx_a_);
            std::fill(clean_.begin(), clean_.end(), 0.0);
            channel(clean_, rx_b_);
            energy[tone].resize(bits);
            kernels::squared_magnitude(rx_a_, rx_b_, energy[tone]);
        }
        rx_.resize(bits);
        kernels::slice_greater(energy[0], energy[1], rx_);
        return count(bits);
    }

    /// Gray label of 3 bits starting at `offset`, mapped to a phase position.
    unsigned phase_position(std::size_t offset) const {
        static constexpr auto inv = inverse_gray8();
        const unsigned label = (tx_[offset] << 2) | (tx_[offset + 1] << 1) | tx_[offset + 2];
        return inv[label];
    }

    void write_label(std::size_t offset, unsigned position) {
        const unsigned label = gray(position);
        rx_[offset] = static_cast<std::uint8_t>((label >> 2) & 1);
        rx_[offset + 1] = static_cast<std::uint8_t>((label >> 1) & 1);
        rx_[offset + 2] = static_cast<std::uint8_t>(label & 1);
    }

    void complex_channel(std::size_t symbols, std::vector<double>& re, std::vector<double>& im) {
        channel(std::span(clean_).first(symbols), re);
        channel(std::span(clean_im_).first(symbols), im);
    }

    std::uint64_t psk8(std::size_t bits) {
        const std::size_t symbols = (bits + 2) / 3;
        random_bits(3 * symbols);
        const double amplitude = std::sqrt(3.0);
        clean_.resize(symbols);
        clean_im_.resize(symbols);
        for (std::size_t s = 0; s < symbols; ++s) {
            const Complex p = amplitude * phase_points8()[phase_position(3 * s)];
            clean_[s] = p.real();
            clean_im_[s] = p.imag();
        }
        complex_channel(symbols, rx_a_, rx_b_);
        rx_.resize(3 * symbols);
        for (std::size_t s = 0; s < symbols; ++s) write_label(3 * s, nearest_phase8(std::atan2(rx_b_[s], rx_a_[s])));
        return count(bits);
    }

    // Phase advances by the Gray-labelled step; a leading reference symbol
    // opens each block.
    std::uint64_t dpsk8(std::size_t bits) {
        const std::size_t symbols = (bits + 2) / 3;
        random_bits(3 * symbols);
        const double amplitude = std::sqrt(3.0);
        clean_.resize(symbols + 1);
        clean_im_.resize(symbols + 1);
        unsigned phase = 0;
        clean_[0] = amplitude;
        clean_im_[0] = 0.0;
        for (std::size_t s = 0; s < symbols; ++s) {
            phase = (phase + phase_position(3 * s)) % 8;
            const Complex p = amplitude * phase_points8()[phase];
            clean_[s + 1] = p.real();
            clean_im_[s + 1] = p.imag();
        }
        complex_channel(symbols + 1, rx_a_, rx_b_);
        rx_.resize(3 * symbols);
        for (std::size_t s = 0; s < symbols; ++s) {
            const Complex previous(rx_a_[s], rx_b_[s]);
            const Complex current(rx_a_[s + 1], rx_b_[s + 1]);
            write_label(3 * s, nearest_phase8(std::arg(current * std::conj(previous))));
        }
        return count(bits);
    }

    static double pam4_level(std::uint8_t sign_bit, std::uint8_t inner_bit) {
        const double a = std::sqrt(0.4);  // 5 a^2 = 2 Eb per 2-bit rail
        return (sign_bit ? -1.0 : 1.0) * (inner_bit ? a : 3.0 * a);
    }

    // 4PAM, and 16QAM as two independent 4PAM rails (I, Q interleaved).
    std::uint64_t pam4_rails(std::size_t bits) {
        const std::size_t samples = (bits + 1) / 2;
        random_bits(2 * samples);
        clean_.resize(samples);
        for (std::size_t i = 0; i < samples; ++i) clean_[i] = pam4_level(tx_[2 * i], tx_[2 * i + 1]);
        channel(clean_, rx_a_);
        rx_.resize(2 * samples);
        kernels::slice_pam4_gray(rx_a_, 2.0 * std::sqrt(0.4), rx_);
        return count(bits);
    }

    std::uint64_t ofdm(const Modulation& mod, std::size_t bits) {
        const Scheme sub = mod.ofdm_subcarrier;
        unsigned k = 0;
        switch (sub) {
            case Scheme::BPSK_QPSK_OQPSK:
            case Scheme::GMSK: k = 1; break;
            case Scheme::PAM4: k = 2; break;
            case Scheme::PSK8: k = 3; break;
            case Scheme::QAM16: k = 4; break;
            default:
                throw DomainError("OFDM Monte Carlo supports BPSK, GMSK, PSK8, PAM4 and QAM16 subcarriers, not " +
                                  std::string(to_string(sub)));
        }
        const std::size_t needed = (bits + k - 1) / k;
        const std::size_t frames = (needed + kOfdmSubcarriers - 1) / kOfdmSubcarriers;
        const std::size_t symbols = frames * kOfdmSubcarriers;
        random_bits(symbols * k);

        std::vector<Complex> grid(symbols);
        const double a = std::sqrt(0.4);
        for (std::size_t s = 0; s < symbols; ++s) {
            const std::size_t o = s * k;
            switch (sub) {
                case Scheme::BPSK_QPSK_OQPSK: grid[s] = tx_[o] ? -1.0 : 1.0; break;
                case Scheme::GMSK: grid[s] = (tx_[o] ? -1.0 : 1.0) * std::sqrt(mod.gmsk_alpha); break;
                case Scheme::PAM4: grid[s] = pam4_level(tx_[o], tx_[o + 1]); break;
                case Scheme::PSK8: grid[s] = std::sqrt(3.0) * phase_points8()[phase_position(o)]; break;
                default: grid[s] = Complex(pam4_level(tx_[o], tx_[o + 1]), pam4_level(tx_[o + 2], tx_[o + 3]));
            }
        }
        for (std::size_t f = 0; f < frames; ++f) unitary_fft(std::span(grid).subspan(f * kOfdmSubcarriers, kOfdmSubcarriers), true);

        clean_.resize(symbols);
        clean_im_.resize(symbols);
        for (std::size_t s = 0; s < symbols; ++s) {
            clean_[s] = grid[s].real();
            clean_im_[s] = grid[s].imag();
        }
        complex_channel(symbols, rx_a_, rx_b_);
        for (std::size_t s = 0; s < symbols; ++s) grid[s] = Complex(rx_a_[s], rx_b_[s]);
        for (std::size_t f = 0; f < frames; ++f) unitary_fft(std::span(grid).subspan(f * kOfdmSubcarriers, kOfdmSubcarriers), false);

        rx_.resize(symbols * k);
        for (std::size_t s = 0; s < symbols; ++s) {
            rx_a_[s] = grid[s].real();
            rx_b_[s] = grid[s].imag();
        }
        const auto re = std::span(rx_a_).first(symbols);
        const auto im = std::span(rx_b_).first(symbols);
        switch (sub) {
            case Scheme::BPSK_QPSK_OQPSK:
            case Scheme::GMSK: kernels::slice_antipodal(re, rx_); break;
            case Scheme::PAM4: kernels::slice_pam4_gray(re, 2.0 * a, rx_); break;
            case Scheme::PSK8:
                for (std::size_t s = 0; s < symbols; ++s) write_label(3 * s, nearest_phase8(std::atan2(im[s], re[s])));
                break;
            default: {
                std::vector<std::uint8_t> i_bits(2 * symbols), q_bits(2 * symbols);
                kernels::slice_pam4_gray(re, 2.0 * a, i_bits);
                kernels::slice_pam4_gray(im, 2.0 * a, q_bits);
                for (std::size_t s = 0; s < symbols; ++s) {
                    rx_[4 * s] = i_bits[2 * s];
                    rx_[4 * s + 1] = i_bits[2 * s + 1];
                    rx_[4 * s + 2] = q_bits[2 * s];
                    rx_[4 * s + 3] = q_bits[2 * s + 1];
                }
            }
        }
        return count(bits);
    }

    std::mt19937_64 rng_;
    std::normal_distribution<double> gauss_;
    double sigma_;
    std::vector<std::uint8_t> tx_, rx_;
    std::vector<double> clean_, clean_im_, noise_, rx_a_, rx_b_;
};

}  // namespace

BerSample ber_monte_carlo(const Modulation& mod, double eb_n0_db, std::uint64_t n_bits, std::uint64_t seed,
                          const MonteCarloOptions& options) {
    validate(mod);
    if (n_bits == 0) throw DomainError("Monte Carlo needs at least one bit");
    if (!std::isfinite(eb_n0_db)) throw DomainError("Eb/N0 must be finite");

    // Eb = 1; noise variance N0 / 2 per real dimension.
    const double gamma = std::pow(10.0, eb_n0_db / 10.0);
    const double sigma = std::sqrt(1.0 / (2.0 * gamma));

    const std::uint64_t blocks = (n_bits + kMonteCarloBlockBits - 1) / kMonteCarloBlockBits;
    std::vector<std::uint64_t> errors(blocks, 0);
    detail::parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::uint64_t first = b * kMonteCarloBlockBits;
        const auto bits = static_cast<std::size_t>(std::min(kMonteCarloBlockBits, n_bits - first));
        Block block(derive_seed(seed, b), sigma);
        errors[b] = block.run(mod, bits);
    });

    BerSample sample;
    sample.eb_n0_db = eb_n0_db;
    sample.source = BerSource::monte_carlo;
    sample.trial_bits = n_bits;
    for (auto e : errors) sample.error_bits += e;
    sample.ber = static_cast<double>(sample.error_bits) / static_cast<double>(n_bits);
    return sample;
}

}  // namespace wsnperf
