#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrx/bitstream.hpp"

namespace qrx {

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 0.0;
    bool pass = false;   // p_value >= alpha (two-sided band for KS aggregates)
    bool two_sided = false;
};

struct AutocorrReport {
    std::vector<unsigned> lags;          // 0..max_lag
    std::vector<double> coefficients;    // coefficient at lag 0 is 1
    double mean_coefficient = 0.0;       // mean over lags >= 1
    double theoretical_std = 0.0;        // 1/sqrt(N)
};

/// Normalized autocorrelation of a numeric series at lags 0..max_lag:
/// r(l) = mean((x_t - xbar)(x_{t+l} - xbar)) / var(x), globally centered.
/// A constant series has no defined correlation and is rejected.
AutocorrReport autocorrelation(std::span<const double> series, unsigned max_lag);

std::vector<double> bits_as_series(const BitVector& bits);
std::vector<double> bytes_as_series(std::span<const std::uint8_t> bytes);

/// Frequency test: p = erfc(|#ones - #zeros| / sqrt(2n)). Needs >= 100 bits.
TestReport monobit(const BitVector& bits, double alpha = 0.01);

/// Per-block ones-fraction chi-square. Needs >= 100 bits and block_len >= 20;
/// the trailing partial block is discarded.
TestReport block_frequency(const BitVector& bits, std::size_t block_len, double alpha = 0.01);

/// Total-runs test against the expectation for i.i.d. bits. Needs >= 100
/// bits; degenerate ones-fractions (|pi - 1/2| >= 2/sqrt(n)) score p = 0.
TestReport runs(const BitVector& bits, double alpha = 0.01);

/// Chi-square of the byte histogram against uniform. Needs >= 1280 bytes so
/// every expected cell count is at least 5.
TestReport chi_square_bytes(std::span<const std::uint8_t> bytes, double alpha = 0.01);

/// The in-repo battery: monobit, block frequency, runs, and (when the length
/// is a byte multiple) byte chi-square.
std::vector<TestReport> run_battery(const BitVector& bits, double alpha = 0.01,
                                    std::size_t block_len = 1024);

/// Kolmogorov-Smirnov uniformity test over a set of p-values; used to
/// aggregate multi-segment runs into one P-value. Two-sided pass band.
TestReport ks_aggregate(std::span<const double> p_values, double alpha = 0.01);

/// Headerless byte-stream export for the external DIEHARD/NIST/TestU01
/// suites. Length must be a byte multiple.
void export_raw(const BitVector& bits, const std::string& path);

// Numeric kernels (documented absolute accuracy ~1e-8 or better).
double erfc_kernel(double x);
/// Regularized upper incomplete gamma Q(a, x), continued-fraction/series
/// split at x = a + 1.
double igamc(double a, double x);

}  // namespace qrx
