#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "qrx/entropy.hpp"
#include "qrx/errors.hpp"
#include "qrx/simulator.hpp"
#include "qrx/stattests.hpp"

using namespace qrx;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.model.gamma = 1.0;
    cfg.model.sigma2_total = 0.0025;  // sigma = 0.05
    cfg.model.mean = 0.5;
    cfg.model.adc_bits = 8;
    cfg.model.adc_min = 0.0;  // +-10 sigma: no saturation distortion
    cfg.model.adc_max = 1.0;
    cfg.classical_kind = ClassicalKind::gaussian;
    cfg.prng_seed = 99;
    cfg.n_samples = 1000000;
    return cfg;
}

double measured_variance(const std::vector<std::uint16_t>& samples, double width, double lo) {
    auto [mean, var] = sample_variance(samples, width, lo + width / 2.0);
    (void)mean;
    return var;
}

}  // namespace

TEST_CASE("identical seeds give identical streams") {
    SimConfig cfg = base_config();
    cfg.n_samples = 5000;
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    CHECK(a == b);
    cfg.prng_seed = 100;
    CHECK(simulate(cfg) != a);
}

TEST_CASE("vanishing total variance pins the code at the mean") {
    SimConfig cfg = base_config();
    cfg.model.sigma2_total = 1e-18;
    cfg.model.mean = 0.502;  // strictly inside the bin for code 128
    cfg.n_samples = 1000;
    const auto samples = simulate(cfg);
    const std::uint16_t expected = 128;
    for (auto s : samples) CHECK(s == expected);
}

TEST_CASE("all-quantum limit recovers sigma2_total within 1%") {
    SimConfig cfg = base_config();
    cfg.model.gamma = 1e9;
    cfg.classical_kind = ClassicalKind::constant;
    cfg.classical_value = 0.0;
    const auto samples = simulate(cfg);
    const double width = 1.0 / 256.0;
    const double var = measured_variance(samples, width, 0.0);
    CHECK(var == doctest::Approx(cfg.model.sigma2_total).epsilon(0.01));
}

TEST_CASE("classical component carries sigma2_total/(1+gamma)") {
    // total variance must land on sigma2_total for both stochastic kinds
    for (ClassicalKind kind : {ClassicalKind::gaussian, ClassicalKind::sinusoidal_drift}) {
        SimConfig cfg = base_config();
        cfg.classical_kind = kind;
        const auto samples = simulate(cfg);
        const double width = 1.0 / 256.0;
        const double var = measured_variance(samples, width, 0.0);
        CHECK(var == doctest::Approx(cfg.model.sigma2_total).epsilon(0.01));
    }
}

TEST_CASE("per-code histogram matches the model bin probabilities") {
    SimConfig cfg = base_config();
    const auto samples = simulate(cfg);
    const auto probs = bin_probabilities(cfg.model, cfg.model.sigma2_total);
    std::vector<double> hist(256, 0.0);
    for (auto s : samples) hist[s] += 1.0;
    // chi-square over codes with expected count >= 5
    double chi2 = 0.0;
    int dof = -1;
    for (int c = 0; c < 256; ++c) {
        const double expected = probs[c] * static_cast<double>(cfg.n_samples);
        if (expected < 5.0) continue;
        chi2 += (hist[c] - expected) * (hist[c] - expected) / expected;
        ++dof;
    }
    REQUIRE(dof > 10);
    const double p = igamc(static_cast<double>(dof) / 2.0, chi2 / 2.0);
    CHECK(p >= 0.01);
}

TEST_CASE("samples are uncorrelated at positive lags") {
    SimConfig cfg = base_config();
    cfg.n_samples = 100000;
    const auto samples = simulate(cfg);
    std::vector<double> series(samples.begin(), samples.end());
    const AutocorrReport rep = autocorrelation(series, 20);
    for (std::size_t i = 1; i < rep.coefficients.size(); ++i)
        CHECK(std::abs(rep.coefficients[i]) <= 3.0 * rep.theoretical_std);
}

TEST_CASE("sample files round-trip with a sidecar") {
    const std::string path = "/tmp/qrx_test_sim_" + std::to_string(::getpid());
    SimConfig cfg = base_config();
    cfg.n_samples = 4096;
    const auto samples = simulate(cfg);
    write_samples(samples, cfg, path);
    CHECK(read_samples(path, 8) == samples);
    std::ifstream meta(path + ".json");
    REQUIRE(meta.good());
    std::string text((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
    CHECK(text.find("splitmix64-counter-v1") != std::string::npos);
    CHECK(text.find("\"prng_seed\": 99") != std::string::npos);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("wide ADC uses two bytes per sample") {
    const std::string path = "/tmp/qrx_test_sim12_" + std::to_string(::getpid());
    SimConfig cfg = base_config();
    cfg.model.adc_bits = 12;
    cfg.n_samples = 1000;
    const auto samples = simulate(cfg);
    bool wide_codes = false;
    for (auto s : samples) {
        CHECK(s < 4096);
        wide_codes = wide_codes || s > 255;
    }
    CHECK(wide_codes);
    write_samples(samples, cfg, path);
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    CHECK(f.tellg() == 2000);
    CHECK(read_samples(path, 12) == samples);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("samples_to_bits packs MSB-first") {
    const std::vector<std::uint16_t> codes = {0xB, 0x3};
    const BitVector v = samples_to_bits(codes, 4);
    CHECK(v.to_string() == "10110011");
    const std::vector<std::uint16_t> bytes = {0xAB, 0x01};
    CHECK(samples_to_bits(bytes, 8).bytes() == std::vector<std::uint8_t>{0xAB, 0x01});
}

TEST_CASE("classical kind names round-trip") {
    for (ClassicalKind k : {ClassicalKind::gaussian, ClassicalKind::sinusoidal_drift,
                            ClassicalKind::constant})
        CHECK(classical_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(classical_kind_from_string("pink"), ContractError);
}
