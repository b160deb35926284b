#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qrx {

/// Physical source model of a continuous-variable QRNG: a Gaussian quantum
/// signal mixed with classical noise, digitized by an ideal ADC.
struct SourceModel {
    double gamma = 1.0;         // quantum-to-classical variance ratio
    double sigma2_total = 1.0;  // total signal variance, V^2
    double mean = 0.0;          // signal mean, V
    unsigned adc_bits = 8;      // converter resolution, 1..16
    double adc_min = -1.0;      // full-scale range, V
    double adc_max = 1.0;

    void validate() const;  // throws ContractError on bad fields
};

struct EntropyReport {
    double sigma2_quantum = 0.0;
    std::vector<double> bin_probs;
    double min_entropy_bits = 0.0;
    double shannon_bits = 0.0;
};

/// Quantum share of the total variance: gamma * sigma2_total / (1 + gamma).
double quantum_variance(const SourceModel& model);

/// Probability of each ADC code for a Gaussian(mean, variance) signal.
/// Codes cut the range [adc_min, adc_max] into 2^adc_bits even bins; the two
/// outermost codes also absorb the tails beyond full scale (saturation).
std::vector<double> bin_probabilities(const SourceModel& model, double variance);

/// -log2 of the most probable outcome. Probabilities must be nonnegative and
/// sum to 1 within 1e-9.
double min_entropy(std::span<const double> probs);

/// -sum p*log2(p) with 0*log(0) = 0. Same preconditions as min_entropy.
double shannon_entropy(std::span<const double> probs);

/// Upper bound on per-sample entropy from the photon number collected in one
/// detection window: log2(power * window * wavelength / (h*c)).
double photon_bound(double power_watts, double wavelength_m, double window_s);

/// Unbiased mean and variance of ADC samples after the affine code->volts
/// conversion v = code * volts_per_code + offset. Needs at least 2 samples.
std::pair<double, double> sample_variance(std::span<const std::uint16_t> samples,
                                          double volts_per_code, double offset);

/// Full per-sample evaluation: quantum variance, code distribution of the
/// quantum signal, and the resulting min/Shannon entropies.
EntropyReport evaluate_entropy(const SourceModel& model);

/// Standard normal CDF built on the erfc kernel. Shared by the entropy model
/// and the simulator so binning and generation agree numerically.
double normal_cdf(double z);

/// Inverse standard normal CDF, accurate to ~1e-13 (rational initial guess
/// refined by Newton steps against normal_cdf).
double normal_quantile(double u);

}  // namespace qrx
