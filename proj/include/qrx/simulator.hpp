#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrx/bitstream.hpp"
#include "qrx/entropy.hpp"

namespace qrx {

enum class ClassicalKind {
    gaussian,          // N(0, sigma2_classical)
    sinusoidal_drift,  // amplitude sqrt(2*sigma2_classical), slow drift
    constant,          // fixed offset
};

std::string to_string(ClassicalKind kind);
ClassicalKind classical_kind_from_string(const std::string& s);

/// Synthetic QRNG source: Gaussian quantum signal of variance
/// gamma*sigma2_total/(1+gamma) plus an independent classical component
/// carrying the remaining sigma2_total/(1+gamma), digitized by the model ADC.
struct SimConfig {
    SourceModel model;
    ClassicalKind classical_kind = ClassicalKind::gaussian;
    double classical_freq = 1e-3;   // cycles per sample (sinusoidal mode)
    double classical_phase = 0.0;   // radians
    double classical_value = 0.0;   // constant mode offset, V
    std::uint64_t prng_seed = 0;
    std::uint64_t n_samples = 0;
};

// Counter-based PRNG core; the sidecar metadata records this identifier.
inline constexpr const char* kSimPrngAlgorithm = "splitmix64-counter-v1";

/// Generates the ADC code sequence. Fully deterministic in prng_seed; sample
/// t consumes counters 2t (quantum draw) and 2t+1 (classical draw).
std::vector<std::uint16_t> simulate(const SimConfig& config);

/// Sample file: 1 byte per code for adc_bits <= 8, 2 bytes little-endian for
/// 9..16 bits. A JSON sidecar at path + ".json" records the full SimConfig.
void write_samples(const std::vector<std::uint16_t>& samples, const SimConfig& config,
                   const std::string& path);
std::vector<std::uint16_t> read_samples(const std::string& path, unsigned adc_bits);

/// Packs samples into a BitVector, adc_bits per sample, MSB-first.
BitVector samples_to_bits(const std::vector<std::uint16_t>& samples, unsigned adc_bits);

namespace detail {
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter);
double uniform_at(std::uint64_t seed, std::uint64_t counter);  // in (0,1)
}  // namespace detail

}  // namespace qrx
