#include "qrx/stattests.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qrx/errors.hpp"

namespace qrx {

double erfc_kernel(double x) { return std::erfc(x); }

namespace {

double ln_gamma(double a) { return std::lgamma(a); }

// Lower regularized incomplete gamma by series; converges for x < a + 1.
double igam_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 1; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Upper regularized incomplete gamma by modified Lentz continued fraction;
// converges for x >= a + 1.
double igamc_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

std::size_t count_ones(const BitVector& bits) {
    std::size_t ones = 0;
    for (std::uint8_t byte : bits.bytes()) ones += static_cast<std::size_t>(std::popcount(byte));
    return ones;
}

TestReport make_report(std::string name, double stat, double p, double alpha,
                       bool two_sided = false) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = stat;
    r.p_value = p;
    r.two_sided = two_sided;
    r.pass = two_sided ? (p >= alpha && p <= 1.0 - alpha) : (p >= alpha);
    return r;
}

}  // namespace

double igamc(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw ContractError("igamc: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - igam_series(a, x);
    return igamc_cf(a, x);
}

AutocorrReport autocorrelation(std::span<const double> series, unsigned max_lag) {
    const std::size_t n = series.size();
    if (max_lag < 1) throw ContractError("autocorrelation: max_lag must be >= 1");
    if (n <= max_lag)
        throw ContractError("autocorrelation: series length must exceed max_lag");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var == 0.0) throw ContractError("autocorrelation: zero variance");

    AutocorrReport rep;
    rep.lags.reserve(max_lag + 1);
    rep.coefficients.reserve(max_lag + 1);
    rep.theoretical_std = 1.0 / std::sqrt(static_cast<double>(n));
    double sum_pos = 0.0;
    for (unsigned lag = 0; lag <= max_lag; ++lag) {
        double cov = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t)
            cov += (series[t] - mean) * (series[t + lag] - mean);
        cov /= static_cast<double>(n - lag);
        const double r = cov / var;
        rep.lags.push_back(lag);
        rep.coefficients.push_back(r);
        if (lag >= 1) sum_pos += r;
    }
    rep.mean_coefficient = sum_pos / static_cast<double>(max_lag);
    return rep;
}

std::vector<double> bits_as_series(const BitVector& bits) {
    std::vector<double> s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits.bit(i) ? 1.0 : 0.0;
    return s;
}

std::vector<double> bytes_as_series(std::span<const std::uint8_t> bytes) {
    std::vector<double> s(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) s[i] = static_cast<double>(bytes[i]);
    return s;
}

TestReport monobit(const BitVector& bits, double alpha) {
    const std::size_t n = bits.size();
    if (n < 100) throw ContractError("monobit: need at least 100 bits");
    const std::size_t ones = count_ones(bits);
    const double s = std::abs(2.0 * static_cast<double>(ones) - static_cast<double>(n));
    const double p = std::erfc(s / std::sqrt(2.0 * static_cast<double>(n)));
    return make_report("monobit", s, p, alpha);
}

TestReport block_frequency(const BitVector& bits, std::size_t block_len, double alpha) {
    const std::size_t n = bits.size();
    if (n < 100) throw ContractError("block_frequency: need at least 100 bits");
    if (block_len < 20) throw ContractError("block_frequency: block length must be >= 20");
    const std::size_t blocks = n / block_len;
    if (blocks < 1) throw ContractError("block_frequency: input shorter than one block");
    double chi2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < block_len; ++i) ones += bits.bit(b * block_len + i);
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(block_len);
    const double p = igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
    return make_report("block_frequency", chi2, p, alpha);
}

TestReport runs(const BitVector& bits, double alpha) {
    const std::size_t n = bits.size();
    if (n < 100) throw ContractError("runs: need at least 100 bits");
    const double pi = static_cast<double>(count_ones(bits)) / static_cast<double>(n);
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n)))
        return make_report("runs", 0.0, 0.0, alpha);  // prerequisite frequency check failed
    std::size_t v = 1;
    for (std::size_t t = 0; t + 1 < n; ++t) v += bits.bit(t) != bits.bit(t + 1);
    const double nn = static_cast<double>(n);
    const double num = std::abs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi);
    const double p = std::erfc(num / den);
    return make_report("runs", static_cast<double>(v), p, alpha);
}

TestReport chi_square_bytes(std::span<const std::uint8_t> bytes, double alpha) {
    if (bytes.size() < 1280)
        throw ContractError("chi_square_bytes: need at least 1280 bytes");
    std::size_t hist[256] = {};
    for (std::uint8_t b : bytes) ++hist[b];
    const double expected = static_cast<double>(bytes.size()) / 256.0;
    double chi2 = 0.0;
    for (std::size_t c = 0; c < 256; ++c) {
        const double d = static_cast<double>(hist[c]) - expected;
        chi2 += d * d / expected;
    }
    const double p = igamc(255.0 / 2.0, chi2 / 2.0);
    return make_report("chi_square_bytes", chi2, p, alpha);
}

std::vector<TestReport> run_battery(const BitVector& bits, double alpha, std::size_t block_len) {
    std::vector<TestReport> reports;
    reports.push_back(monobit(bits, alpha));
    reports.push_back(block_frequency(bits, block_len, alpha));
    reports.push_back(runs(bits, alpha));
    if (bits.size() % 8 == 0 && bits.size() / 8 >= 1280)
        reports.push_back(chi_square_bytes(bits.bytes(), alpha));
    return reports;
}

TestReport ks_aggregate(std::span<const double> p_values, double alpha) {
    if (p_values.empty()) throw ContractError("ks_aggregate: no p-values");
    std::vector<double> sorted(p_values.begin(), p_values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d_max = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double lo = sorted[i] - static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n - sorted[i];
        d_max = std::max({d_max, lo, hi});
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d_max;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::exp(-2.0 * lambda * lambda * j * j);
        p += (j % 2 == 1) ? term : -term;
    }
    p = std::clamp(p, 0.0, 1.0);
    return make_report("ks_aggregate", d_max, p, alpha, /*two_sided=*/true);
}

void export_raw(const BitVector& bits, const std::string& path) {
    write_bits(bits, path, BitFileFormat::raw);
}

}  // namespace qrx
