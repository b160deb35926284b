#pragma once

#include <cstdint>

#include "qrx/bitstream.hpp"

namespace qrx {

/// Sizing of a Toeplitz-hashing extraction: n input bits of min-entropy k
/// hashed to m output bits with security parameter eps = 2^epsilon_log2.
/// Seed length is n + m - 1.
struct ToeplitzParams {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    double k = 0.0;            // may be fractional (entropy rate * samples)
    double epsilon_log2 = 0.0; // log2(eps) <= 0

    std::uint64_t seed_bits() const { return n + m - 1; }
};

/// Output length from the leftover-hash bound: m = floor(k + 2*log2(eps)).
/// Throws SizingError when no positive output length remains.
std::uint64_t toeplitz_output_length(double k, double epsilon_log2);

/// log2 of the security parameter achieved by an (n -> m) hash of a source
/// with min-entropy k: (m - k) / 2. Requires m <= k.
double toeplitz_epsilon_log2(double k, double m);

/// Validated parameter bundle; m computed from (k, epsilon_log2).
ToeplitzParams make_toeplitz_params(std::uint64_t n, double k, double epsilon_log2);

/// Multiplies the input by the seed-defined Toeplitz matrix over GF(2).
///
/// The m x n matrix is T[i][j] = seed[i - j + n - 1]: the first column top to
/// bottom is seed[n-1 .. n+m-2] and the first row right to left is
/// seed[0 .. n-1], every diagonal constant. Word-packed carry-less
/// convolution; agrees bit-exactly with toeplitz_extract_ref.
BitVector toeplitz_extract(const BitVector& seed, const BitVector& input, std::uint64_t m);

/// Reference path: materializes each matrix row bit by bit.
BitVector toeplitz_extract_ref(const BitVector& seed, const BitVector& input, std::uint64_t m);

}  // namespace qrx
