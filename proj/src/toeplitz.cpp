#include "qrx/toeplitz.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qrx/errors.hpp"

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#endif

namespace qrx {

std::uint64_t toeplitz_output_length(double k, double epsilon_log2) {
    if (epsilon_log2 > 0.0)
        throw ContractError("toeplitz_output_length: log2(eps) must be <= 0");
    const double m = std::floor(k + 2.0 * epsilon_log2);
    if (m <= 0.0)
        throw SizingError("insufficient min-entropy: k=" + std::to_string(k) +
                          " with log2(eps)=" + std::to_string(epsilon_log2) +
                          " leaves no output");
    return static_cast<std::uint64_t>(m);
}

double toeplitz_epsilon_log2(double k, double m) {
    if (m > k)
        throw SizingError("toeplitz_epsilon_log2: output length exceeds min-entropy");
    return (m - k) / 2.0;
}

ToeplitzParams make_toeplitz_params(std::uint64_t n, double k, double epsilon_log2) {
    if (n == 0) throw ContractError("make_toeplitz_params: n must be positive");
    if (k > static_cast<double>(n))
        throw ContractError("make_toeplitz_params: min-entropy k exceeds input length");
    ToeplitzParams p;
    p.n = n;
    p.k = k;
    p.epsilon_log2 = epsilon_log2;
    p.m = toeplitz_output_length(k, epsilon_log2);
    if (p.m > n)
        throw SizingError("make_toeplitz_params: output length exceeds input length");
    return p;
}

namespace {
void check_lengths(const BitVector& seed, const BitVector& input, std::uint64_t m) {
    if (m == 0) throw ContractError("toeplitz_extract: m must be positive");
    const std::uint64_t n = input.size();
    if (n == 0) throw ContractError("toeplitz_extract: empty input");
    if (m > n) throw ContractError("toeplitz_extract: m must not exceed n");
    if (seed.size() != n + m - 1)
        throw ContractError("toeplitz_extract: seed must have n+m-1 = " +
                            std::to_string(n + m - 1) + " bits, got " +
                            std::to_string(seed.size()));
}

using u128 = unsigned __int128;

inline u128 clmul64w(std::uint64_t a, std::uint64_t b) {
#if defined(__PCLMUL__)
    __m128i va = _mm_set_epi64x(0, static_cast<long long>(a));
    __m128i vb = _mm_set_epi64x(0, static_cast<long long>(b));
    __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
    u128 r = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(p, 8)));
    return (r << 64) | static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
#else
    u128 tab[16];
    tab[0] = 0;
    tab[1] = b;
    for (int k = 2; k < 16; ++k)
        tab[k] = (tab[k >> 1] << 1) ^ tab[k & 1];
    u128 acc = 0;
    for (int i = 0; i < 16; ++i)
        acc ^= tab[(a >> (4 * i)) & 0xF] << (4 * i);
    return acc;
#endif
}
}  // namespace

BitVector toeplitz_extract_ref(const BitVector& seed, const BitVector& input, std::uint64_t m) {
    check_lengths(seed, input, m);
    const std::uint64_t n = input.size();
    BitVector out(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        unsigned acc = 0;
        for (std::uint64_t j = 0; j < n; ++j)
            acc ^= static_cast<unsigned>(seed.bit(i - j + n - 1) & input.bit(j));
        out.set_bit(i, acc & 1u);
    }
    return out;
}

// out[i] = xor_j input[j] & seed[n-1+i-j] is coefficient n-1+i of the
// carry-less polynomial product input(z)*seed(z), so the whole extraction is
// one word-blocked clmul.
BitVector toeplitz_extract(const BitVector& seed, const BitVector& input, std::uint64_t m) {
    check_lengths(seed, input, m);
    const std::uint64_t n = input.size();
    const auto in_w = to_words_lsb(input);
    const auto seed_w = to_words_lsb(seed);
    std::vector<std::uint64_t> prod(in_w.size() + seed_w.size() + 1, 0);
    for (std::size_t i = 0; i < in_w.size(); ++i) {
        if (in_w[i] == 0) continue;
        for (std::size_t j = 0; j < seed_w.size(); ++j) {
            if (seed_w[j] == 0) continue;
            const u128 p = clmul64w(in_w[i], seed_w[j]);
            prod[i + j] ^= static_cast<std::uint64_t>(p);
            prod[i + j + 1] ^= static_cast<std::uint64_t>(p >> 64);
        }
    }
    // coefficients n-1 .. n+m-2
    std::vector<std::uint64_t> out_w((m + 63) / 64, 0);
    const std::uint64_t base = n - 1;
    const unsigned sh = base % 64;
    const std::size_t w0 = base / 64;
    for (std::size_t i = 0; i < out_w.size(); ++i) {
        std::uint64_t w = prod[w0 + i] >> sh;
        if (sh != 0 && w0 + i + 1 < prod.size()) w |= prod[w0 + i + 1] << (64 - sh);
        out_w[i] = w;
    }
    return from_words_lsb(out_w, m);
}

}  // namespace qrx
