#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ftn {

inline constexpr double pi = 3.14159265358979323846;

// Root-raised-cosine impulse response at time t (in units of the Nyquist
// interval T), roll-off beta, unit T.  The closed form has removable
// singularities at t = 0 and |t| = 1/(4 beta); both are replaced by their
// analytic limits.  beta = 0 degenerates to sinc(t).
inline double rrc_time(double t, double beta) {
    const double a = std::abs(t);
    if (a < 1e-12) {
        return 1.0 + beta * (4.0 / pi - 1.0);
    }
    if (beta > 0.0) {
        const double s = 4.0 * beta * a;
        if (std::abs(s - 1.0) < 1e-9) {
            const double c = pi / (4.0 * beta);
            return (beta / std::sqrt(2.0)) *
                   ((1.0 + 2.0 / pi) * std::sin(c) + (1.0 - 2.0 / pi) * std::cos(c));
        }
        const double num = std::sin(pi * a * (1.0 - beta)) +
                           s * std::cos(pi * a * (1.0 + beta));
        return num / (pi * a * (1.0 - s * s));
    }
    return std::sin(pi * a) / (pi * a);
}

// Sampled rRC pulse: 2*span*Q + 1 taps at spacing T/Q, normalized so the
// discrete energy sum((taps^2)) / Q equals 1.
struct RrcPulse {
    double beta = 0.0;
    int samples_per_symbol = 16;  // Q
    int span = 16;                // one-sided extent in symbol intervals
    std::vector<double> taps;

    int center() const { return span * samples_per_symbol; }
};

inline RrcPulse make_rrc(double beta, int samples_per_symbol, int span) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("make_rrc: beta must be in [0, 1]");
    }
    if (samples_per_symbol < 4) {
        throw std::invalid_argument("make_rrc: samples_per_symbol must be >= 4");
    }
    if (span < 4) {
        throw std::invalid_argument("make_rrc: span must be >= 4");
    }
    RrcPulse p;
    p.beta = beta;
    p.samples_per_symbol = samples_per_symbol;
    p.span = span;
    const int half = span * samples_per_symbol;
    p.taps.resize(2 * half + 1);
    // Evaluate the right half and mirror it so even symmetry holds exactly.
    for (int i = 0; i <= half; ++i) {
        const double v = rrc_time(static_cast<double>(i) / samples_per_symbol, beta);
        p.taps[half + i] = v;
        p.taps[half - i] = v;
    }
    double energy = 0.0;
    for (double v : p.taps) energy += v * v;
    energy /= samples_per_symbol;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : p.taps) v *= scale;
    return p;
}

// Discrete pulse autocorrelation sum(p(t) p(t - lag)) * (T/Q); lag in units
// of T.  Non-integer sample shifts use linear interpolation of the shifted
// copy.  Even in lag, so it is evaluated at |lag|.
inline double autocorrelation_at(const RrcPulse& pulse, double lag) {
    const int q = pulse.samples_per_symbol;
    const double a = std::abs(lag);
    if (a > 2.0 * pulse.span) {
        throw std::out_of_range("autocorrelation_at: |lag| exceeds 2*span");
    }
    const double shift = a * q;
    const double whole = std::floor(shift);
    const int m = static_cast<int>(whole);
    const double frac = shift - whole;
    const auto& h = pulse.taps;
    const int n = static_cast<int>(h.size());
    double acc = 0.0;
    if (frac == 0.0) {
        for (int i = m; i < n; ++i) acc += h[i] * h[i - m];
    } else {
        const double w0 = frac;        // weight of h[i - m - 1]
        const double w1 = 1.0 - frac;  // weight of h[i - m]
        for (int i = m + 1; i < n; ++i) {
            acc += h[i] * (w0 * h[i - m - 1] + w1 * h[i - m]);
        }
    }
    return acc / q;
}

// One-sided ISI footprint at symbol spacing tau*T: g_taps[i] = g(i*tau)/g(0)
// for i = 0..L-1, with g_taps[0] pinned to exactly 1.  L extends to the
// largest lag whose normalized magnitude exceeds eps_trunc (interior taps
// below threshold are kept so indices stay aligned with lags), capped at
// floor(2*span/tau) which is the full support of the autocorrelation.
struct IsiProfile {
    double tau = 1.0;
    std::vector<double> g_taps;

    int length() const { return static_cast<int>(g_taps.size()); }  // L
};

inline IsiProfile isi_profile(const RrcPulse& pulse, double tau,
                              double eps_trunc = 1e-3) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("isi_profile: tau must be in (0, 1]");
    }
    const double support = 2.0 * pulse.span;
    const int cap = static_cast<int>(std::floor(support / tau + 1e-12));
    const double g0 = autocorrelation_at(pulse, 0.0);
    int last = 0;
    std::vector<double> raw(1, 1.0);
    for (int i = 1; i < cap; ++i) {
        const double lag = std::min(i * tau, support);
        const double gi = autocorrelation_at(pulse, lag) / g0;
        raw.push_back(gi);
        if (eps_trunc <= 0.0 || std::abs(gi) > eps_trunc) last = i;
    }
    IsiProfile prof;
    prof.tau = tau;
    prof.g_taps.assign(raw.begin(), raw.begin() + last + 1);
    return prof;
}

// Plain-text tap dump: one header line, then one tap per line with enough
// digits to round-trip a double.
inline void dump_taps(std::ostream& os, const RrcPulse& pulse) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# beta=%g Q=%d span=%d\n", pulse.beta,
                  pulse.samples_per_symbol, pulse.span);
    os << buf;
    for (double v : pulse.taps) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        os << buf;
    }
}

}  // namespace ftn
