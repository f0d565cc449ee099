#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ftn/chain.hpp"
#include "ftn/pulse.hpp"

namespace ftn {

// Pulse discretization used by the boundary search.  The short span keeps
// the tap lattice to the lags that dominate the worst-case ISI sum; see the
// boundary tests for the calibration against the reference operating points.
struct PulseParams {
    int samples_per_symbol = 16;
    int span = 4;
    double eps_trunc = 1e-3;
};

struct RegionQuery {
    double beta = 0.0;
    double tau = 1.0;
    Modulation modulation = Modulation::bpsk;
    IsiProfile profile;
};

// Magnitude of the worst upcoming-symbol interference on one sample:
// sum of |g_taps| over the interfering lags.  BPSK reaches it with
// sign-opposing symbols; QPSK reaches the same value on each quadrature
// rail independently, so one number serves both constellations.
inline double worst_case_isi(const IsiProfile& profile) {
    double acc = 0.0;
    for (int i = 1; i < profile.length(); ++i) acc += std::abs(profile.g_taps[i]);
    return acc;
}

// Perfect-estimation condition: the center tap must strictly dominate the
// worst-case upcoming ISI.  Ties (within 1e-12) count as violations since
// guaranteed recovery needs strict dominance.
inline bool satisfies_lemma(const IsiProfile& profile) {
    return profile.g_taps[0] - worst_case_isi(profile) > 1e-12;
}

inline bool satisfies_lemma(const RegionQuery& query) {
    // The condition applies per quadrature, so BPSK and QPSK agree.
    return satisfies_lemma(query.profile);
}

// The L-1 upcoming symbols whose weighted sum maximally opposes the center
// tap's contribution for the given current symbol: on each rail, upcoming
// symbol i gets sign -sign(a_k rail) * sign(g_taps[i+1]).
inline SymbolSequence adversarial_sequence(const IsiProfile& profile, cplx a_k,
                                           Modulation mod) {
    const int l = profile.length();
    if (l < 2) {
        throw std::invalid_argument(
            "adversarial_sequence: no upcoming ISI exists for L < 2");
    }
    SymbolSequence seq;
    seq.symbols.reserve(l - 1);
    const double re_sign = a_k.real() < 0.0 ? -1.0 : 1.0;
    const double im_sign = a_k.imag() < 0.0 ? -1.0 : 1.0;
    for (int i = 1; i < l; ++i) {
        const double oppose = profile.g_taps[i] < 0.0 ? 1.0 : -1.0;
        if (mod == Modulation::bpsk) {
            seq.symbols.emplace_back(oppose * re_sign, 0.0);
        } else {
            const double r = 1.0 / std::sqrt(2.0);
            seq.symbols.emplace_back(oppose * re_sign * r, oppose * im_sign * r);
        }
    }
    return seq;
}

// Walk tau down from 1 in grid_step decrements and return the smallest tau
// that still satisfies the lemma; the ISI footprint is rebuilt at each tau
// since the tap lattice moves with the symbol spacing.
inline double find_boundary(double beta, double grid_step = 0.01,
                            const PulseParams& pp = PulseParams{}) {
    if (!(grid_step > 0.0)) {
        throw std::invalid_argument("find_boundary: grid_step must be > 0");
    }
    const RrcPulse pulse = make_rrc(beta, pp.samples_per_symbol, pp.span);
    double last_ok = 1.0;
    for (int i = 0;; ++i) {
        const double tau = 1.0 - i * grid_step;
        if (tau <= grid_step / 2.0) break;
        if (!satisfies_lemma(isi_profile(pulse, tau, pp.eps_trunc))) break;
        last_ok = tau;
    }
    return last_ok;
}

struct BoundaryRow {
    double beta = 0.0;
    double tau_min = 1.0;
    double se_bpsk = 0.0;
    double se_qpsk = 0.0;
};

struct RegionBoundary {
    std::vector<BoundaryRow> rows;
    double grid_step = 0.01;
};

inline RegionBoundary boundary_table(const std::vector<double>& betas,
                                     double grid_step = 0.01,
                                     const PulseParams& pp = PulseParams{}) {
    RegionBoundary table;
    table.grid_step = grid_step;
    table.rows.reserve(betas.size());
    for (double beta : betas) {
        BoundaryRow row;
        row.beta = beta;
        row.tau_min = find_boundary(beta, grid_step, pp);
        row.se_bpsk = 1.0 / ((1.0 + beta) * row.tau_min);
        row.se_qpsk = 2.0 * row.se_bpsk;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace ftn
