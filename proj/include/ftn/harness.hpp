#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ftn/chain.hpp"
#include "ftn/detect.hpp"
#include "ftn/pulse.hpp"
#include "ftn/rng.hpp"

namespace ftn {

struct ExperimentConfig {
    FtnConfig ftn;
    int go_back_k = 0;               // 0 selects the plain estimator
    double eps_trunc = 1e-3;         // ISI truncation threshold
    std::vector<double> ebn0_db_list;
    int block_len = 1000;            // symbols per Monte-Carlo block
    long long min_bit_errors = 100;
    long long max_bits = 10'000'000;
    std::uint64_t master_seed = 1;
    bool waveform_path = false;      // simulate the full waveform chain
    int workers = 1;
};

struct BerRecord {
    double ebn0_db = 0.0;
    long long bit_errors = 0;
    long long bits_simulated = 0;
    double ber = 0.0;
    double ci95_halfwidth = 0.0;
    bool budget_exhausted = false;   // max_bits hit before min_bit_errors
};

struct SeRecord {
    double beta = 0.0;
    double tau = 1.0;
    Modulation modulation = Modulation::qpsk;
    long long cp_len = 0;     // guard symbols some block equalizers need
    long long block_len = 0;
    double se = 0.0;          // bits/sec/Hz
};

// log2(M) * (N - nu) / ((1 + beta) * tau * N): bits per second per hertz of
// occupied bandwidth, discounted for any guard overhead nu.
inline double spectral_efficiency(Modulation mod, double beta, double tau,
                                  long long n, long long nu) {
    if (nu < 0 || nu >= n) {
        throw std::invalid_argument("spectral_efficiency: need 0 <= nu < N");
    }
    return bits_per_symbol(mod) * static_cast<double>(n - nu) /
           ((1.0 + beta) * tau * static_cast<double>(n));
}

namespace detail {

// Blocks are dispatched in fixed-size rounds so the stopping decision — and
// therefore the simulated block set — never depends on the worker count.
inline constexpr int blocks_per_round = 16;

struct BlockTally {
    long long bit_errors = 0;
    long long bits = 0;
};

// One independent Monte-Carlo block: random bits through the chain and the
// detector, compared bit-for-bit.  Everything is a pure function of the
// block seed, so blocks can run on any thread in any order.
inline BlockTally run_block(const ExperimentConfig& cfg, const FtnConfig& chain_cfg,
                            const IsiProfile& profile, double sigma2,
                            std::uint64_t block_seed) {
    const int bps = bits_per_symbol(cfg.ftn.modulation);
    std::mt19937_64 bit_rng = make_stream(block_seed, 0);
    std::vector<int> bits(static_cast<std::size_t>(cfg.block_len) * bps);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = static_cast<int>(bit_rng() >> 63);
    }
    const SymbolSequence tx = map_bits(bits, cfg.ftn.modulation);
    const NoiseSpec noise{sigma2, derive_seed(block_seed, 1)};
    SampleSequence rx;
    if (cfg.waveform_path) {
        rx = matched_filter_sample(add_awgn(modulate(tx, chain_cfg), noise),
                                   chain_cfg);
    } else {
        rx = discrete_receive(tx, profile, chain_cfg, noise);
    }
    DetectorConfig det{profile, cfg.ftn.modulation, cfg.go_back_k,
                       std::sqrt(chain_cfg.symbol_energy)};
    const DetectionResult hat = detect(rx, det);
    const std::vector<int> rx_bits = demap_symbols(hat.symbols, cfg.ftn.modulation);
    BlockTally tally;
    tally.bits = static_cast<long long>(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        tally.bit_errors += bits[i] != rx_bits[i];
    }
    return tally;
}

}  // namespace detail

// Simulate one Eb/N0 point until min_bit_errors have been seen or max_bits
// spent.  The per-point seed folds in the Eb/N0 value so points of a sweep
// do not share noise; fixed master_seed gives bit-identical results for any
// worker count.
inline BerRecord run_ber_point(const ExperimentConfig& cfg, double ebn0_db) {
    const long long block_bits =
        static_cast<long long>(cfg.block_len) * bits_per_symbol(cfg.ftn.modulation);
    if (cfg.block_len < 1 || cfg.min_bit_errors < 1 || cfg.workers < 1 ||
        cfg.max_bits < block_bits) {
        throw std::invalid_argument("run_ber_point: invalid experiment config");
    }
    FtnConfig chain_cfg = cfg.ftn;
    if (cfg.waveform_path) {
        chain_cfg.samples_per_symbol =
            aligned_q(cfg.ftn.tau, cfg.ftn.samples_per_symbol);
    }
    const RrcPulse pulse = make_rrc(chain_cfg.beta, chain_cfg.samples_per_symbol,
                                    chain_cfg.span);
    const IsiProfile profile = isi_profile(pulse, chain_cfg.tau, cfg.eps_trunc);
    const double sigma2 = noise_sigma2_for_ebn0(ebn0_db, chain_cfg);
    const std::uint64_t point_seed =
        derive_seed(cfg.master_seed, std::bit_cast<std::uint64_t>(ebn0_db));

    long long errors = 0;
    long long bits = 0;
    long long next_block = 0;
    while (errors < cfg.min_bit_errors && bits < cfg.max_bits) {
        const int nthreads = std::min(cfg.workers, detail::blocks_per_round);
        std::vector<detail::BlockTally> partial(nthreads);
        std::vector<std::exception_ptr> failures(nthreads);
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int b = w; b < detail::blocks_per_round; b += nthreads) {
                        const std::uint64_t seed =
                            derive_seed(point_seed, static_cast<std::uint64_t>(next_block + b));
                        const detail::BlockTally t =
                            detail::run_block(cfg, chain_cfg, profile, sigma2, seed);
                        partial[w].bit_errors += t.bit_errors;
                        partial[w].bits += t.bits;
                    }
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
        for (const auto& t : partial) {
            errors += t.bit_errors;
            bits += t.bits;
        }
        next_block += detail::blocks_per_round;
    }

    BerRecord rec;
    rec.ebn0_db = ebn0_db;
    rec.bit_errors = errors;
    rec.bits_simulated = bits;
    rec.ber = bits > 0 ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
    rec.ci95_halfwidth =
        bits > 0 ? 1.96 * std::sqrt(rec.ber * (1.0 - rec.ber) / static_cast<double>(bits))
                 : 0.0;
    rec.budget_exhausted = errors < cfg.min_bit_errors;
    return rec;
}

inline std::vector<BerRecord> run_ber_curve(const ExperimentConfig& cfg) {
    std::vector<BerRecord> records;
    records.reserve(cfg.ebn0_db_list.size());
    for (double db : cfg.ebn0_db_list) {
        records.push_back(run_ber_point(cfg, db));
    }
    return records;
}

inline void emit_csv(const std::vector<BerRecord>& records, std::ostream& os) {
    os << "ebn0_db,bit_errors,bits,ber,ci95\n";
    char buf[160];
    for (const BerRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%.10g,%lld,%lld,%.10g,%.10g\n", r.ebn0_db,
                      r.bit_errors, r.bits_simulated, r.ber, r.ci95_halfwidth);
        os << buf;
    }
}

inline void emit_csv(const std::vector<BerRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("emit_csv: cannot open " + path);
    }
    emit_csv(records, out);
    if (!out.good()) {
        throw std::runtime_error("emit_csv: write failed for " + path);
    }
}

}  // namespace ftn
