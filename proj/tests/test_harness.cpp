#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>
#include <string>

#include "ftn/harness.hpp"

using namespace ftn;

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.ftn = {Modulation::qpsk, 1.0, 0.3, 1.0, 16, 16};
    cfg.block_len = 1000;
    cfg.min_bit_errors = 100;
    cfg.max_bits = 1e7;
    cfg.master_seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("spectral efficiency follows the bandwidth-time packing formula") {
    CHECK_THAT(spectral_efficiency(Modulation::qpsk, 0.3, 0.9, 1000, 0),
               Catch::Matchers::WithinAbs(1.7094, 5e-4));
    CHECK_THAT(spectral_efficiency(Modulation::qpsk, 0.5, 0.8, 1000, 0),
               Catch::Matchers::WithinAbs(1.6667, 5e-4));
    CHECK(spectral_efficiency(Modulation::qpsk, 0.0, 1.0, 1000, 0) == 2.0);
    // Overhead symbols scale the rate by (n - nu) / n.
    CHECK_THAT(spectral_efficiency(Modulation::bpsk, 0.0, 1.0, 100, 10),
               Catch::Matchers::WithinAbs(0.9, 1e-12));
    CHECK_THROWS_AS(spectral_efficiency(Modulation::qpsk, 0.3, 0.9, 100, 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(spectral_efficiency(Modulation::qpsk, 0.3, 0.9, 100, -1),
                    std::invalid_argument);
}

TEST_CASE("orthogonal-spacing error rate matches the Gaussian tail") {
    ExperimentConfig cfg = base_config();
    for (double db : {2.0, 6.0}) {
        const BerRecord rec = run_ber_point(cfg, db);
        const double theory = q_function(std::sqrt(2.0 * std::pow(10.0, db / 10.0)));
        CAPTURE(db, rec.ber, theory, rec.ci95_halfwidth);
        CHECK(std::abs(rec.ber - theory) < 3.0 * rec.ci95_halfwidth);
        CHECK(rec.bit_errors >= 100);
        CHECK_FALSE(rec.budget_exhausted);
    }
}

TEST_CASE("deep noise drives the error rate to a coin flip") {
    ExperimentConfig cfg = base_config();
    const BerRecord rec = run_ber_point(cfg, -30.0);
    CHECK(rec.ber > 0.45);
    CHECK(rec.ber < 0.55);
}

TEST_CASE("noise-free transmission inside the region is error-free") {
    ExperimentConfig cfg = base_config();
    cfg.ftn.tau = 0.6;
    cfg.max_bits = 200000;
    const double inf = std::numeric_limits<double>::infinity();
    const BerRecord rec = run_ber_point(cfg, inf);
    CHECK(rec.bit_errors == 0);
    CHECK(rec.ber == 0.0);
    CHECK(rec.budget_exhausted);
    CHECK(rec.bits_simulated >= 200000);
}

TEST_CASE("a degenerate noise model fails loudly instead of silently") {
    // At tau = 0.6 the symbol-rate correlation matrix is singular (the
    // compressed spectrum folds to zero over part of the band), so colored
    // noise cannot be synthesized at any finite SNR.  The failure must
    // surface as an exception on the calling thread, not a crash.
    ExperimentConfig cfg = base_config();
    cfg.ftn.tau = 0.6;
    cfg.workers = 4;
    CHECK_THROWS_AS(run_ber_point(cfg, 300.0), std::runtime_error);
}

TEST_CASE("results are reproducible and independent of the worker count") {
    ExperimentConfig cfg = base_config();
    cfg.ftn.tau = 0.9;
    cfg.go_back_k = 1;
    cfg.ebn0_db_list = {0.0, 2.0};

    cfg.workers = 1;
    const std::vector<BerRecord> serial = run_ber_curve(cfg);
    cfg.workers = 4;
    const std::vector<BerRecord> parallel = run_ber_curve(cfg);

    std::ostringstream a, b;
    emit_csv(serial, a);
    emit_csv(parallel, b);
    REQUIRE(a.str() == b.str());

    cfg.master_seed = 43;
    const std::vector<BerRecord> other = run_ber_curve(cfg);
    std::ostringstream c;
    emit_csv(other, c);
    CHECK(a.str() != c.str());
}

TEST_CASE("the confidence interval is the binomial normal approximation") {
    ExperimentConfig cfg = base_config();
    const BerRecord rec = run_ber_point(cfg, 4.0);
    const double p = rec.ber;
    const double expected =
        1.96 * std::sqrt(p * (1.0 - p) / rec.bits_simulated);
    CHECK_THAT(rec.ci95_halfwidth, Catch::Matchers::WithinRel(expected, 1e-12));
}

TEST_CASE("csv output has a fixed header and one row per record") {
    std::vector<BerRecord> recs;
    std::ostringstream empty;
    emit_csv(recs, empty);
    CHECK(empty.str() == "ebn0_db,bit_errors,bits,ber,ci95\n");

    recs.push_back({4.0, 123, 10000, 0.0123, 0.002, false});
    std::ostringstream one;
    emit_csv(recs, one);
    const std::string text = one.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("4,123,10000,0.0123,0.002") != std::string::npos);

    for (int i = 0; i < 7; ++i) recs.push_back({i + 5.0, 10, 1000000, 1e-5, 1e-6, true});
    std::ostringstream eight;
    emit_csv(recs, eight);
    const std::string eight_text = eight.str();
    CHECK(std::count(eight_text.begin(), eight_text.end(), '\n') == 9);

    const std::string path = "harness_csv_roundtrip.tmp";
    emit_csv(recs, path);
    std::ifstream in(path);
    std::stringstream back;
    back << in.rdbuf();
    CHECK(back.str() == eight_text);
    std::remove(path.c_str());

    CHECK_THROWS_AS(emit_csv(recs, "no_such_dir/out.csv"), std::runtime_error);
}

TEST_CASE("waveform and matrix simulation paths agree on the error rate") {
    ExperimentConfig cfg = base_config();
    cfg.ftn.tau = 0.9;
    cfg.max_bits = 2e5;
    cfg.min_bit_errors = 1'000'000;  // run the full budget on both paths

    const BerRecord discrete = run_ber_point(cfg, 3.0);
    cfg.waveform_path = true;
    const BerRecord waveform = run_ber_point(cfg, 3.0);

    CAPTURE(discrete.ber, waveform.ber);
    CHECK(std::abs(discrete.ber - waveform.ber) <
          3.0 * (discrete.ci95_halfwidth + waveform.ci95_halfwidth));
    CHECK(discrete.bits_simulated == waveform.bits_simulated);
}

TEST_CASE("invalid experiment configurations are rejected") {
    ExperimentConfig cfg = base_config();
    cfg.block_len = 0;
    CHECK_THROWS_AS(run_ber_point(cfg, 4.0), std::invalid_argument);

    cfg = base_config();
    cfg.min_bit_errors = 0;
    CHECK_THROWS_AS(run_ber_point(cfg, 4.0), std::invalid_argument);

    cfg = base_config();
    cfg.max_bits = 100.0;  // below one block's worth of bits
    CHECK_THROWS_AS(run_ber_point(cfg, 4.0), std::invalid_argument);

    cfg = base_config();
    cfg.workers = 0;
    CHECK_THROWS_AS(run_ber_point(cfg, 4.0), std::invalid_argument);

    cfg = base_config();
    cfg.ftn.tau = 1.0 / 3.0;
    cfg.waveform_path = true;  // no sample grid holds a third of a symbol
    CHECK_THROWS_AS(run_ber_point(cfg, 4.0), std::invalid_argument);
}
