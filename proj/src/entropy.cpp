#include "qrx/entropy.hpp"

#include <cmath>
#include <string>

#include "qrx/errors.hpp"

namespace qrx {

void SourceModel::validate() const {
    if (!(gamma > 0.0)) throw ContractError("SourceModel: gamma must be > 0");
    if (!(sigma2_total > 0.0)) throw ContractError("SourceModel: sigma2_total must be > 0");
    if (adc_bits < 1 || adc_bits > 16)
        throw ContractError("SourceModel: adc_bits must be in 1..16");
    if (!(adc_min < adc_max)) throw ContractError("SourceModel: adc_min must be < adc_max");
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace {
// Rational approximation for the initial guess (Acklam), then two Halley
// refinements against the shared normal_cdf kernel.
double quantile_guess(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}
}  // namespace

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw ContractError("normal_quantile: argument must be in (0,1)");
    double x = quantile_guess(u);
    for (int it = 0; it < 2; ++it) {
        const double e = normal_cdf(x) - u;
        const double t = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
        x -= t / (1.0 + x * t / 2.0);
    }
    return x;
}

double quantum_variance(const SourceModel& model) {
    model.validate();
    return model.gamma * model.sigma2_total / (1.0 + model.gamma);
}

std::vector<double> bin_probabilities(const SourceModel& model, double variance) {
    model.validate();
    if (!(variance > 0.0)) throw ContractError("bin_probabilities: variance must be > 0");
    const std::size_t codes = std::size_t{1} << model.adc_bits;
    const double sigma = std::sqrt(variance);
    const double width = (model.adc_max - model.adc_min) / static_cast<double>(codes);
    std::vector<double> probs(codes);
    auto cdf_at_edge = [&](std::size_t j) {
        return normal_cdf((model.adc_min + width * static_cast<double>(j) - model.mean) / sigma);
    };
    // code 0 and code 2^b-1 absorb the tails beyond full scale (saturation)
    probs[0] = cdf_at_edge(1);
    probs[codes - 1] = 1.0 - cdf_at_edge(codes - 1);
    for (std::size_t j = 1; j + 1 < codes; ++j)
        probs[j] = cdf_at_edge(j + 1) - cdf_at_edge(j);
    return probs;
}

namespace {
void check_distribution(std::span<const double> probs, const char* who) {
    if (probs.empty()) throw ContractError(std::string(who) + ": empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ContractError(std::string(who) + ": negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ContractError(std::string(who) + ": probabilities sum to " + std::to_string(sum));
}
}  // namespace

double min_entropy(std::span<const double> probs) {
    check_distribution(probs, "min_entropy");
    double pmax = 0.0;
    for (double p : probs) pmax = std::max(pmax, p);
    return -std::log2(pmax);
}

double shannon_entropy(std::span<const double> probs) {
    check_distribution(probs, "shannon_entropy");
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double photon_bound(double power_watts, double wavelength_m, double window_s) {
    if (!(power_watts > 0.0 && wavelength_m > 0.0 && window_s > 0.0))
        throw ContractError("photon_bound: all inputs must be > 0");
    constexpr double hc = 1.98645e-25;  // J*m
    return std::log2(power_watts * window_s * wavelength_m / hc);
}

std::pair<double, double> sample_variance(std::span<const std::uint16_t> samples,
                                          double volts_per_code, double offset) {
    if (samples.size() < 2)
        throw ContractError("sample_variance: need at least 2 samples");
    double mean = 0.0;
    for (auto s : samples) mean += static_cast<double>(s);
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (auto s : samples) {
        const double dv = static_cast<double>(s) - mean;
        ss += dv * dv;
    }
    const double var_codes = ss / static_cast<double>(samples.size() - 1);
    return {mean * volts_per_code + offset, var_codes * volts_per_code * volts_per_code};
}

EntropyReport evaluate_entropy(const SourceModel& model) {
    EntropyReport report;
    report.sigma2_quantum = quantum_variance(model);
    report.bin_probs = bin_probabilities(model, report.sigma2_quantum);
    report.min_entropy_bits = min_entropy(report.bin_probs);
    report.shannon_bits = shannon_entropy(report.bin_probs);
    return report;
}

}  // namespace qrx
