#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ftn/chain.hpp"
#include "ftn/pulse.hpp"

namespace ftn {

struct DetectorConfig {
    IsiProfile profile;
    Modulation modulation = Modulation::qpsk;
    int K = 0;                // go-back depth; 0 selects the plain estimator
    double es_scale = 1.0;    // sqrt(Es), divided out before quantization
};

// Arithmetic beyond the cost of memoryless Nyquist detection: the adds and
// multiplies spent inside ISI-cancellation sums.  Scaling divisions, the
// subtractions that apply a finished sum to y_k, and the quantizer itself
// are common to Nyquist detection and not counted.
struct OpCount {
    long long additions = 0;
    long long multiplications = 0;
};

struct DetectionResult {
    SymbolSequence symbols;
    OpCount op_count;
};

// Nearest constellation point, decided per rail; an exact zero goes to +.
inline cplx quantize(cplx v, Modulation mod) {
    if (mod == Modulation::bpsk) {
        return cplx(v.real() < 0.0 ? -1.0 : 1.0, 0.0);
    }
    const double r = 1.0 / std::sqrt(2.0);
    return cplx(v.real() < 0.0 ? -r : r, v.imag() < 0.0 ? -r : r);
}

namespace detail {

// Dot product of tap window gg[1..terms] with decided symbols ending just
// before (for past ISI) or just after (for upcoming ISI) the target index.
// Out-of-range symbol indices contribute zero but the arithmetic is still
// performed, so the per-symbol operation count stays uniform; the counter
// charges n multiplies and n-1 adds for an n-term window.
inline cplx isi_window(const std::vector<double>& gg,
                       const std::vector<cplx>& dec, int start, int stride,
                       int terms, OpCount& ops) {
    cplx acc(0.0, 0.0);
    int idx = start;
    for (int j = 1; j <= terms; ++j, idx += stride) {
        const cplx a = (idx >= 0 && idx < static_cast<int>(dec.size()))
                           ? dec[idx]
                           : cplx(0.0, 0.0);
        acc += gg[j] * a;
    }
    ops.multiplications += terms;
    if (terms > 1) ops.additions += terms - 1;
    return acc;
}

}  // namespace detail

// Left-to-right successive estimation: subtract the ISI of already-decided
// past symbols from y_k, rescale, quantize, move on.  Costs L-1 multiplies
// and L-2 adds per symbol.
inline DetectionResult ssse(const SampleSequence& in, const DetectorConfig& cfg) {
    const int n = in.size();
    const int l = cfg.profile.length();
    const double inv = 1.0 / (cfg.es_scale * cfg.profile.g_taps[0]);
    DetectionResult res;
    res.symbols.symbols.assign(n, cplx(0.0, 0.0));
    auto& dec = res.symbols.symbols;
    for (int k = 0; k < n; ++k) {
        const cplx past =
            detail::isi_window(cfg.profile.g_taps, dec, k - 1, -1, l - 1, res.op_count);
        dec[k] = quantize(in.samples[k] * inv - past, cfg.modulation);
    }
    return res;
}

// Go-back-K refinement.  Each new tentative decision triggers a second look
// at the previous K symbols in ascending order: every re-estimate removes
// both its own past ISI and the upcoming ISI of the newer decisions between
// it and the current symbol, then the current symbol is re-decided from the
// refreshed predecessors.  One pass per symbol, no end-of-block flush.
//
// Only the re-estimation sums are charged to the counters — the tentative
// and final decisions reuse the plain estimator's bookkeeping slot — giving
// K(L-2) + K(K-1)/2 adds and K(L-1) + K(K+1)/2 multiplies per symbol.  The
// upcoming window deliberately runs over all k-m lags (taps beyond L-1 are
// zero-padded) so the count matches that cost model even when K > L-1.
inline DetectionResult sssgbkse(const SampleSequence& in, const DetectorConfig& cfg) {
    if (cfg.K < 1) {
        throw std::invalid_argument("sssgbkse: K must be >= 1 (use ssse for K = 0)");
    }
    const int n = in.size();
    const int l = cfg.profile.length();
    const double inv = 1.0 / (cfg.es_scale * cfg.profile.g_taps[0]);
    std::vector<double> gg = cfg.profile.g_taps;
    if (static_cast<int>(gg.size()) < cfg.K + 1) gg.resize(cfg.K + 1, 0.0);
    DetectionResult res;
    res.symbols.symbols.assign(n, cplx(0.0, 0.0));
    auto& dec = res.symbols.symbols;
    OpCount uncounted;
    for (int k = 0; k < n; ++k) {
        const cplx first =
            detail::isi_window(gg, dec, k - 1, -1, l - 1, uncounted);
        dec[k] = quantize(in.samples[k] * inv - first, cfg.modulation);
        for (int m = k - cfg.K; m < k; ++m) {
            if (m < 0) continue;
            const cplx past =
                detail::isi_window(gg, dec, m - 1, -1, l - 1, res.op_count);
            const cplx upcoming =
                detail::isi_window(gg, dec, m + 1, +1, k - m, res.op_count);
            dec[m] = quantize(in.samples[m] * inv - past - upcoming, cfg.modulation);
        }
        const cplx refreshed =
            detail::isi_window(gg, dec, k - 1, -1, l - 1, uncounted);
        dec[k] = quantize(in.samples[k] * inv - refreshed, cfg.modulation);
    }
    return res;
}

inline DetectionResult detect(const SampleSequence& in, const DetectorConfig& cfg) {
    return cfg.K == 0 ? ssse(in, cfg) : sssgbkse(in, cfg);
}

}  // namespace ftn
