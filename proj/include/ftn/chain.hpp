#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ftn/pulse.hpp"
#include "ftn/rng.hpp"

namespace ftn {

using cplx = std::complex<double>;

enum class Modulation { bpsk, qpsk };

inline int bits_per_symbol(Modulation m) {
    return m == Modulation::bpsk ? 1 : 2;
}

struct FtnConfig {
    Modulation modulation = Modulation::qpsk;
    double tau = 1.0;            // symbol spacing tau*T, 0 < tau <= 1
    double beta = 0.3;           // pulse roll-off
    double symbol_energy = 1.0;  // Es
    int samples_per_symbol = 16; // Q, waveform samples per T
    int span = 16;               // one-sided pulse span in T
};

struct SymbolSequence {
    std::vector<cplx> symbols;

    int size() const { return static_cast<int>(symbols.size()); }
};

struct Waveform {
    std::vector<cplx> samples;  // spacing T/Q
    double start_time = 0.0;    // time of samples[0] in units of T
};

struct SampleSequence {
    std::vector<cplx> samples;  // spacing tau*T

    int size() const { return static_cast<int>(samples.size()); }
};

// sigma2 is the complex-noise variance per waveform sample.  The same spec
// drives both receive paths: the discrete model divides by Q to recover the
// matched-filter output noise level N0.
struct NoiseSpec {
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
};

// Gray mapping.  BPSK: 0 -> +1, 1 -> -1.  QPSK: bit pairs (b0, b1) set the
// real and imaginary signs independently, 00 -> (1+j)/sqrt(2), so adjacent
// constellation points differ in one bit.
inline SymbolSequence map_bits(const std::vector<int>& bits, Modulation mod) {
    SymbolSequence seq;
    if (mod == Modulation::bpsk) {
        seq.symbols.reserve(bits.size());
        for (int b : bits) seq.symbols.emplace_back(b ? -1.0 : 1.0, 0.0);
        return seq;
    }
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("map_bits: QPSK needs an even bit count");
    }
    const double r = 1.0 / std::sqrt(2.0);
    seq.symbols.reserve(bits.size() / 2);
    for (std::size_t i = 0; i + 1 < bits.size(); i += 2) {
        seq.symbols.emplace_back(bits[i] ? -r : r, bits[i + 1] ? -r : r);
    }
    return seq;
}

inline std::vector<int> demap_symbols(const SymbolSequence& seq, Modulation mod) {
    std::vector<int> bits;
    if (mod == Modulation::bpsk) {
        bits.reserve(seq.symbols.size());
        for (const cplx& s : seq.symbols) bits.push_back(s.real() < 0.0 ? 1 : 0);
        return bits;
    }
    bits.reserve(2 * seq.symbols.size());
    for (const cplx& s : seq.symbols) {
        bits.push_back(s.real() < 0.0 ? 1 : 0);
        bits.push_back(s.imag() < 0.0 ? 1 : 0);
    }
    return bits;
}

// Symbol spacing in waveform samples.  The waveform grid only represents
// delays that are whole sample counts, so tau*Q must be an integer.
inline int tau_step_samples(double tau, int samples_per_symbol) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("tau must be in (0, 1]");
    }
    const double step = tau * samples_per_symbol;
    const double rounded = std::round(step);
    if (std::abs(step - rounded) > 1e-9) {
        throw std::invalid_argument(
            "tau*Q is not an integer; raise Q (see aligned_q) or adjust tau");
    }
    return static_cast<int>(rounded);
}

// Smallest Q >= q_min that puts tau on the sample grid, for tau expressed
// with at most two decimals (tau = r/100 reduced to lowest terms).
inline int aligned_q(double tau, int q_min) {
    const double scaled = tau * 100.0;
    const long r = std::lround(scaled);
    if (std::abs(scaled - r) > 1e-6 || r <= 0) {
        throw std::invalid_argument("aligned_q: tau must have at most two decimals");
    }
    const long den = 100 / std::gcd(r, 100L);
    const long q = ((q_min + den - 1) / den) * den;
    return static_cast<int>(q);
}

// s(t) = sqrt(Es) sum_n a_n p(t - n tau T): superposition of pulse replicas
// every tau*T.  The waveform spans the full leading and trailing tails.
inline Waveform modulate(const SymbolSequence& seq, const FtnConfig& cfg) {
    const RrcPulse pulse = make_rrc(cfg.beta, cfg.samples_per_symbol, cfg.span);
    const int step = tau_step_samples(cfg.tau, cfg.samples_per_symbol);
    const int plen = static_cast<int>(pulse.taps.size());
    const int n = seq.size();
    Waveform w;
    w.start_time = -static_cast<double>(cfg.span);
    w.samples.assign(n > 0 ? (n - 1) * step + plen : 0, cplx(0.0, 0.0));
    const double amp = std::sqrt(cfg.symbol_energy);
    for (int k = 0; k < n; ++k) {
        const cplx a = amp * seq.symbols[k];
        const int base = k * step;
        for (int j = 0; j < plen; ++j) {
            w.samples[base + j] += a * pulse.taps[j];
        }
    }
    return w;
}

// Adds circularly-symmetric complex Gaussian noise, variance sigma2 per
// sample (half per real dimension).  Deterministic for a fixed seed.
inline Waveform add_awgn(const Waveform& in, const NoiseSpec& noise) {
    if (noise.sigma2 < 0.0) {
        throw std::invalid_argument("add_awgn: sigma2 must be >= 0");
    }
    Waveform out = in;
    if (noise.sigma2 == 0.0) return out;
    std::mt19937_64 rng = make_stream(noise.seed, 0);
    const double s = std::sqrt(noise.sigma2 / 2.0);
    for (cplx& v : out.samples) {
        const GaussianPair z = gaussian_pair(rng);
        v += cplx(s * z.z0, s * z.z1);
    }
    return out;
}

// Matched filter (correlate with the pulse, scale T/Q) sampled at t = k tau T.
// With the tap grid used by modulate, sample k reduces to a dot product of
// the pulse with the waveform slice starting at k*step.
inline SampleSequence matched_filter_sample(const Waveform& w, const FtnConfig& cfg) {
    const RrcPulse pulse = make_rrc(cfg.beta, cfg.samples_per_symbol, cfg.span);
    const int step = tau_step_samples(cfg.tau, cfg.samples_per_symbol);
    const int plen = static_cast<int>(pulse.taps.size());
    const int len = static_cast<int>(w.samples.size());
    if (len < plen || (len - plen) % step != 0) {
        throw std::invalid_argument(
            "matched_filter_sample: waveform length does not match config");
    }
    const int n = (len - plen) / step + 1;
    SampleSequence out;
    out.samples.reserve(n);
    for (int k = 0; k < n; ++k) {
        const int base = k * step;
        cplx acc(0.0, 0.0);
        for (int j = 0; j < plen; ++j) {
            acc += w.samples[base + j] * pulse.taps[j];
        }
        out.samples.push_back(acc / static_cast<double>(cfg.samples_per_symbol));
    }
    return out;
}

// Banded Cholesky G = Lc Lc^T of the symmetric Toeplitz matrix with first
// column g[0..bw] (zero beyond).  Row-major band storage: elem(i, d) holds
// Lc[i][i-d] for d = 0..bw.  Returns false on a non-positive pivot.
struct BandedCholesky {
    int n = 0;
    int bw = 0;
    std::vector<double> elems;  // n rows * (bw + 1) offsets

    double at(int i, int d) const { return elems[static_cast<std::size_t>(i) * (bw + 1) + d]; }
    double& at(int i, int d) { return elems[static_cast<std::size_t>(i) * (bw + 1) + d]; }
};

inline bool banded_cholesky(const std::vector<double>& g, int n, BandedCholesky& out) {
    const int bw = static_cast<int>(g.size()) - 1;
    out.n = n;
    out.bw = bw;
    out.elems.assign(static_cast<std::size_t>(n) * (bw + 1), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int d = std::min(i, bw); d >= 0; --d) {
            const int j = i - d;
            double s = g[d];
            const int k0 = std::max(0, i - bw);
            for (int k = k0; k < j; ++k) {
                s -= out.at(i, i - k) * out.at(j, j - k);
            }
            if (d == 0) {
                if (s <= 0.0) return false;
                out.at(i, 0) = std::sqrt(s);
            } else {
                out.at(i, d) = s / out.at(j, 0);
            }
        }
    }
    return true;
}

// Discrete equivalent model y = sqrt(Es) G a + w.  G is the banded symmetric
// Toeplitz ISI matrix from the profile; w is complex Gaussian with covariance
// sigma_w^2 G (the matched filter colors the noise), generated by drawing
// white unit-variance samples and applying the banded Cholesky factor of G.
// sigma_w^2 = sigma2 / Q, the noise level at the matched-filter output.
inline SampleSequence discrete_receive(const SymbolSequence& seq,
                                       const IsiProfile& profile,
                                       const FtnConfig& cfg,
                                       const NoiseSpec& noise) {
    if (noise.sigma2 < 0.0) {
        throw std::invalid_argument("discrete_receive: sigma2 must be >= 0");
    }
    const int n = seq.size();
    const int l = profile.length();
    const auto& g = profile.g_taps;
    const double amp = std::sqrt(cfg.symbol_energy);
    SampleSequence out;
    out.samples.assign(n, cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
        cplx acc = g[0] * seq.symbols[k];
        for (int d = 1; d < l; ++d) {
            if (k - d >= 0) acc += g[d] * seq.symbols[k - d];
            if (k + d < n) acc += g[d] * seq.symbols[k + d];
        }
        out.samples[k] = amp * acc;
    }
    if (noise.sigma2 == 0.0 || n == 0) return out;

    const double sigma_w2 = noise.sigma2 / cfg.samples_per_symbol;
    BandedCholesky chol;
    if (!banded_cholesky(g, n, chol)) {
        // Truncation can nudge G marginally indefinite; a tiny diagonal
        // jitter restores positive definiteness without moving the taps.
        std::vector<double> jittered = g;
        jittered[0] += 1e-9;
        if (!banded_cholesky(jittered, n, chol)) {
            throw std::runtime_error(
                "discrete_receive: truncated ISI matrix is not positive definite");
        }
        std::cerr << "discrete_receive: applied 1e-9 diagonal jitter to the "
                     "ISI covariance\n";
    }
    std::mt19937_64 rng = make_stream(noise.seed, 0);
    std::vector<cplx> white(n);
    const double s = std::sqrt(sigma_w2 / 2.0);
    for (cplx& v : white) {
        const GaussianPair z = gaussian_pair(rng);
        v = cplx(s * z.z0, s * z.z1);
    }
    for (int i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        const int k0 = std::max(0, i - chol.bw);
        for (int k = k0; k <= i; ++k) {
            acc += chol.at(i, i - k) * white[k];
        }
        out.samples[i] += acc;
    }
    return out;
}

// Waveform-sample noise variance for a target Eb/N0.  N0 = Es / (10^(x/10)
// log2 M); a unit-energy pulse then needs sigma2 = N0 * Q per waveform sample
// so the matched-filter output noise lands at N0 * g(0).
inline double noise_sigma2_for_ebn0(double ebn0_db, const FtnConfig& cfg) {
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double n0 = cfg.symbol_energy / (ebn0 * bits_per_symbol(cfg.modulation));
    return n0 * cfg.samples_per_symbol;
}

}  // namespace ftn
