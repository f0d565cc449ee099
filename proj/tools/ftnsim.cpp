// Command-line front end: boundary tables, BER curves, spectral-efficiency
// numbers, and waveform-vs-matrix cross checks, all emitted as CSV.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ftn/ftn.hpp"

namespace {

using namespace ftn;

// "start:step:stop" (inclusive, tolerant of float drift) or a single number.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> out;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        out.push_back(std::stod(text));
        return out;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        throw CLI::ValidationError("range", "expected start:step:stop, got " + text);
    }
    const double start = std::stod(text.substr(0, c1));
    const double step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double stop = std::stod(text.substr(c2 + 1));
    if (!(step > 0.0)) {
        throw CLI::ValidationError("range", "step must be > 0 in " + text);
    }
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + step * 1e-9) break;
        out.push_back(v);
    }
    if (out.empty()) {
        throw CLI::ValidationError("range", "empty range " + text);
    }
    return out;
}

Modulation parse_mod(const std::string& name) {
    if (name == "bpsk") return Modulation::bpsk;
    if (name == "qpsk") return Modulation::qpsk;
    throw CLI::ValidationError("--mod", "must be bpsk or qpsk, got " + name);
}

// Stream sink: stdout by default, a file when --out is given.
struct OutputSink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) {
            throw std::runtime_error("cannot open output file " + path);
        }
        os = &file;
    }
    void finish() const {
        if (os->fail()) {
            throw std::runtime_error("write failed");
        }
    }
};

int run_region(const std::string& betas_text, double grid_step, int q, int span,
               double eps, const std::string& out_path) {
    const std::vector<double> betas = parse_range(betas_text);
    const PulseParams pp{q, span, eps};
    const RegionBoundary table = boundary_table(betas, grid_step, pp);
    OutputSink sink(out_path);
    *sink.os << "beta,tau_min,se_bpsk,se_qpsk\n";
    char buf[96];
    for (const BoundaryRow& row : table.rows) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%.2f,%.2f\n", row.beta,
                      row.tau_min, row.se_bpsk, row.se_qpsk);
        *sink.os << buf;
    }
    sink.finish();
    return 0;
}

int run_ber(const ExperimentConfig& cfg, const std::string& out_path) {
    const std::vector<BerRecord> records = run_ber_curve(cfg);
    OutputSink sink(out_path);
    emit_csv(records, *sink.os);
    sink.finish();
    for (const BerRecord& r : records) {
        if (r.budget_exhausted) {
            std::cerr << "note: bit budget exhausted at " << r.ebn0_db
                      << " dB before reaching the target error count\n";
        }
    }
    return 0;
}

int run_se_single(Modulation mod, double beta, double tau, int block, int nu,
                  const std::string& out_path) {
    const double se = spectral_efficiency(mod, beta, tau, block, nu);
    OutputSink sink(out_path);
    *sink.os << "mod,beta,tau,block,nu,se\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%g,%g,%d,%d,%.6g\n",
                  mod == Modulation::bpsk ? "bpsk" : "qpsk", beta, tau, block, nu,
                  se);
    *sink.os << buf;
    sink.finish();
    return 0;
}

// Sweep mode: for each roll-off, find the tightest compression whose go-back
// detector still tracks the orthogonal-spacing error rate at the target BER,
// and report the spectral efficiency achieved there.
int run_se_sweep(const std::string& betas_text, int go_back_k, double target_ber,
                 double max_bits, double tau_step, std::uint64_t seed, int threads,
                 const std::string& out_path) {
    const std::vector<double> betas = parse_range(betas_text);
    // SNR at which ideal QPSK sits on the target BER:
    // invert Q(sqrt(2*g)) = p by bisection on g.
    const auto qfun = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
    double lo = 0.0, hi = 20.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (qfun(std::sqrt(2.0 * mid)) > target_ber ? lo : hi) = mid;
    }
    const double snr_db = 10.0 * std::log10(0.5 * (lo + hi));

    OutputSink sink(out_path);
    *sink.os << "beta,tau,se\n";
    char buf[96];
    for (double beta : betas) {
        double best_tau = 1.0;
        for (int i = 0;; ++i) {
            const double tau = 1.0 - i * tau_step;
            if (tau < 0.5 * tau_step) break;
            const double tau_r = std::round(tau * 100.0) / 100.0;
            ExperimentConfig cfg;
            cfg.ftn = {Modulation::qpsk, tau_r, beta, 1.0, 16, 16};
            cfg.go_back_k = go_back_k;
            cfg.min_bit_errors = 1'000'000'000;  // run the full bit budget
            cfg.max_bits = static_cast<long long>(max_bits);
            cfg.master_seed = seed;
            cfg.workers = threads;
            BerRecord rec;
            try {
                rec = run_ber_point(cfg, snr_db);
            } catch (const std::runtime_error&) {
                break;  // compression too deep for the noise model
            }
            // Accept while the measured BER stays within CI reach of target.
            if (rec.ber > target_ber + 3.0 * rec.ci95_halfwidth) break;
            best_tau = tau_r;
        }
        const double se =
            spectral_efficiency(Modulation::qpsk, beta, best_tau, 1000, 0);
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%.4g\n", beta, best_tau, se);
        *sink.os << buf;
        sink.os->flush();
    }
    sink.finish();
    return 0;
}

int run_validate(int trials, std::uint64_t seed, double tol, int noise_checks) {
    std::mt19937_64 rng = make_stream(seed, 0);
    const auto pick = [&](int n) { return static_cast<int>(rng() % n); };

    int failures = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        FtnConfig cfg;
        cfg.modulation = pick(2) == 0 ? Modulation::bpsk : Modulation::qpsk;
        cfg.tau = 0.50 + 0.05 * pick(11);
        cfg.beta = 0.05 * pick(21);
        cfg.symbol_energy = 0.5 + 3.5 * uniform_unit(rng);
        cfg.samples_per_symbol = aligned_q(cfg.tau, 16);
        cfg.span = 16;

        const int nsym = 48;
        std::vector<int> bits(static_cast<std::size_t>(nsym) *
                              bits_per_symbol(cfg.modulation));
        for (int& b : bits) b = static_cast<int>(rng() & 1);
        const SymbolSequence tx = map_bits(bits, cfg.modulation);

        const RrcPulse pulse = make_rrc(cfg.beta, cfg.samples_per_symbol, cfg.span);
        const IsiProfile profile = isi_profile(pulse, cfg.tau, 0.0);
        const SampleSequence direct = discrete_receive(tx, profile, cfg, {0.0, 0});
        const SampleSequence filtered =
            matched_filter_sample(modulate(tx, cfg), cfg);
        double err = 0.0;
        for (int i = 0; i < nsym; ++i) {
            err = std::max(err, std::abs(filtered.samples[i] - direct.samples[i]));
        }
        worst = std::max(worst, err);
        if (!(err <= tol)) {
            ++failures;
            std::printf("FAIL trial %d: beta=%.2f tau=%.2f max|diff|=%.3g\n", t,
                        cfg.beta, cfg.tau, err);
        }
    }
    std::printf("%s waveform vs matrix samples: %d/%d trials within %g (worst %.3g)\n",
                failures == 0 ? "PASS" : "FAIL", trials - failures, trials, tol,
                worst);

    // Noise coloring spot check: accumulate the lag-0/1/2 covariance of
    // matched-filter noise and compare against the expected profile.
    {
        FtnConfig cfg{Modulation::qpsk, 0.9, 0.3, 1.0, 20, 16};
        const RrcPulse pulse = make_rrc(cfg.beta, cfg.samples_per_symbol, cfg.span);
        const IsiProfile profile = isi_profile(pulse, cfg.tau, 0.0);
        const double n0 = 0.5;
        const int nsym = 8;
        const SymbolSequence zeros{std::vector<cplx>(nsym, cplx(0.0, 0.0))};
        const Waveform silent = modulate(zeros, cfg);
        double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
        for (int r = 0; r < noise_checks; ++r) {
            const NoiseSpec noise{n0 * cfg.samples_per_symbol,
                                  derive_seed(seed, 1000 + r)};
            const SampleSequence y =
                matched_filter_sample(add_awgn(silent, noise), cfg);
            const int mid = nsym / 2;
            acc0 += std::norm(y.samples[mid]);
            acc1 += (y.samples[mid] * std::conj(y.samples[mid + 1])).real();
            acc2 += (y.samples[mid] * std::conj(y.samples[mid + 2])).real();
        }
        acc0 /= noise_checks;
        acc1 /= noise_checks;
        acc2 /= noise_checks;
        const double g1 = profile.length() > 1 ? profile.g_taps[1] : 0.0;
        const double g2 = profile.length() > 2 ? profile.g_taps[2] : 0.0;
        const bool ok = std::abs(acc0 - n0) < 0.05 * n0 &&
                        std::abs(acc1 - n0 * g1) < 0.05 * n0 &&
                        std::abs(acc2 - n0 * g2) < 0.05 * n0;
        failures += !ok;
        std::printf(
            "%s matched-filter noise covariance: lag0 %.4f (want %.4f), "
            "lag1 %.4f (want %.4f), lag2 %.4f (want %.4f)\n",
            ok ? "PASS" : "FAIL", acc0, n0, acc1, n0 * g1, acc2, n0 * g2);
    }
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Faster-than-Nyquist signaling simulator"};
    app.require_subcommand(1);

    // region
    auto* region = app.add_subcommand(
        "region", "Emit the perfect-estimation boundary table as CSV");
    std::string region_betas = "0:0.1:1";
    double grid_step = 0.01;
    int region_q = 16, region_span = 4;
    double region_eps = 1e-3;
    std::string region_out;
    region->add_option("--betas", region_betas, "roll-offs, start:step:stop or one value");
    region->add_option("--grid-step", grid_step, "compression search step");
    region->add_option("--q", region_q, "samples per symbol interval");
    region->add_option("--span", region_span, "pulse half-length in symbols");
    region->add_option("--eps", region_eps, "ISI tap truncation threshold");
    region->add_option("--out", region_out, "output CSV path (default stdout)");

    // ber
    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER curve as CSV");
    double ber_beta = 0.3, ber_tau = 1.0;
    std::string ber_mod = "qpsk", ber_ebn0, ber_path = "discrete", ber_out;
    int ber_k = 0, ber_block = 1000, ber_threads = 1;
    long long ber_min_errors = 100;
    double ber_max_bits = 1e7;
    std::uint64_t ber_seed = 1;
    ber->add_option("--beta", ber_beta, "pulse roll-off")->capture_default_str();
    ber->add_option("--tau", ber_tau, "time compression (1 = orthogonal)")
        ->capture_default_str();
    ber->add_option("--mod", ber_mod, "bpsk or qpsk")->capture_default_str();
    ber->add_option("--k", ber_k, "go-back depth, 0 = one-shot estimator")
        ->capture_default_str();
    ber->add_option("--ebn0", ber_ebn0, "Eb/N0 dB sweep, start:step:stop")
        ->required();
    ber->add_option("--block", ber_block, "symbols per block")->capture_default_str();
    ber->add_option("--min-errors", ber_min_errors, "bit errors per point")
        ->capture_default_str();
    ber->add_option("--max-bits", ber_max_bits, "bit budget per point")
        ->capture_default_str();
    ber->add_option("--seed", ber_seed, "master seed")->capture_default_str();
    ber->add_option("--path", ber_path, "discrete or waveform simulation path")
        ->capture_default_str();
    ber->add_option("--threads", ber_threads, "worker threads")->capture_default_str();
    ber->add_option("--out", ber_out, "output CSV path (default stdout)");

    // se
    auto* se = app.add_subcommand("se", "Spectral-efficiency table as CSV");
    std::string se_mod = "qpsk", se_out, se_betas = "0:0.1:1";
    double se_beta = 0.3, se_tau = 0.9;
    int se_block = 1000, se_nu = 0, se_k = 3, se_threads = 1;
    bool se_sweep = false;
    double se_target = 1e-4, se_budget = 1e6, se_step = 0.02;
    std::uint64_t se_seed = 1;
    se->add_option("--mod", se_mod, "bpsk or qpsk")->capture_default_str();
    se->add_option("--beta", se_beta, "pulse roll-off")->capture_default_str();
    se->add_option("--tau", se_tau, "time compression")->capture_default_str();
    se->add_option("--block", se_block, "block length in symbols")
        ->capture_default_str();
    se->add_option("--nu", se_nu, "overhead symbols per block")->capture_default_str();
    se->add_flag("--sweep", se_sweep,
                 "sweep roll-offs for the tightest compression whose go-back "
                 "detector holds the target BER (long-running at full budget)");
    se->add_option("--betas", se_betas, "sweep roll-offs, start:step:stop");
    se->add_option("--k", se_k, "sweep go-back depth")->capture_default_str();
    se->add_option("--target-ber", se_target, "sweep BER operating point")
        ->capture_default_str();
    se->add_option("--budget", se_budget, "sweep bits per probe")->capture_default_str();
    se->add_option("--tau-step", se_step, "sweep compression step")
        ->capture_default_str();
    se->add_option("--seed", se_seed, "sweep master seed")->capture_default_str();
    se->add_option("--threads", se_threads, "sweep worker threads")
        ->capture_default_str();
    se->add_option("--out", se_out, "output CSV path (default stdout)");

    // validate
    auto* validate = app.add_subcommand(
        "validate", "Cross-check the waveform chain against the matrix model");
    int val_trials = 50, val_noise = 20000;
    std::uint64_t val_seed = 1;
    double val_tol = 1e-3;
    validate->add_option("--trials", val_trials, "random configurations to test")
        ->capture_default_str();
    validate->add_option("--seed", val_seed, "master seed")->capture_default_str();
    validate->add_option("--tol", val_tol, "max sample disagreement")
        ->capture_default_str();
    validate->add_option("--noise-checks", val_noise, "noise realizations")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (region->parsed()) {
            return run_region(region_betas, grid_step, region_q, region_span,
                              region_eps, region_out);
        }
        if (ber->parsed()) {
            ExperimentConfig cfg;
            cfg.ftn.modulation = parse_mod(ber_mod);
            cfg.ftn.tau = ber_tau;
            cfg.ftn.beta = ber_beta;
            cfg.go_back_k = ber_k;
            cfg.ebn0_db_list = parse_range(ber_ebn0);
            cfg.block_len = ber_block;
            cfg.min_bit_errors = ber_min_errors;
            cfg.max_bits = static_cast<long long>(ber_max_bits);
            cfg.master_seed = ber_seed;
            if (ber_path == "waveform") {
                cfg.waveform_path = true;
            } else if (ber_path != "discrete") {
                throw std::invalid_argument("--path must be discrete or waveform");
            }
            cfg.workers = ber_threads;
            return run_ber(cfg, ber_out);
        }
        if (se->parsed()) {
            if (se_sweep) {
                return run_se_sweep(se_betas, se_k, se_target, se_budget, se_step,
                                    se_seed, se_threads, se_out);
            }
            return run_se_single(parse_mod(se_mod), se_beta, se_tau, se_block,
                                 se_nu, se_out);
        }
        return run_validate(val_trials, val_seed, val_tol, val_noise);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
