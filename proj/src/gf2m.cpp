#include "qrx/gf2m.hpp"

#include <bit>
#include <string>

#include "qrx/errors.hpp"

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#endif

namespace qrx {

namespace {

using u128 = unsigned __int128;

// Smallest-mask irreducible polynomial of degree m (leading x^m term
// dropped), index m-1. The widely deployed constants fall out of this rule:
// m=8 is the AES polynomial, m=128 the GCM polynomial.
constexpr std::uint64_t kStandardPoly[128] = {
    0x01, 0x03, 0x03, 0x03, 0x05, 0x03, 0x03, 0x1b,
    0x03, 0x09, 0x05, 0x09, 0x1b, 0x21, 0x03, 0x2b,
    0x09, 0x09, 0x27, 0x09, 0x05, 0x03, 0x21, 0x1b,
    0x09, 0x1b, 0x27, 0x03, 0x05, 0x03, 0x09, 0x8d,
    0x4b, 0x1b, 0x05, 0x35, 0x3f, 0x63, 0x11, 0x39,
    0x09, 0x27, 0x59, 0x21, 0x1b, 0x03, 0x21, 0x2d,
    0x71, 0x1d, 0x4b, 0x09, 0x47, 0x7d, 0x47, 0x95,
    0x11, 0x63, 0x7b, 0x03, 0x27, 0x69, 0x03, 0x1b,
    0x1b, 0x09, 0x27, 0xa3, 0x65, 0x2b, 0x2b, 0x5f,
    0x1d, 0x47, 0x4b, 0x35, 0x65, 0x5f, 0x1d, 0xaf,
    0x11, 0xd7, 0x95, 0x21, 0x107, 0x65, 0xa3, 0x3f,
    0x69, 0x2d, 0xed, 0x65, 0x05, 0x63, 0x77, 0x6f,
    0x41, 0x99, 0x4b, 0x65, 0xc3, 0x69, 0xbd, 0x1b,
    0x11, 0x63, 0xaf, 0x53, 0x35, 0x53, 0x95, 0x39,
    0x2d, 0x2d, 0xaf, 0x17, 0x27, 0x65, 0x101, 0x1b,
    0x123, 0x47, 0x05, 0x7d, 0xaf, 0x95, 0x03, 0x87,
};

// Remainder of a mod b over GF(2), b != 0.
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
    const int db = std::bit_width(b) - 1;
    while (a != 0) {
        const int da = std::bit_width(a) - 1;
        if (da < db) break;
        a ^= b << (da - db);
    }
    return a;
}

// Trial division by every polynomial of degree 1..m/2. Only used for m <= 16.
bool is_irreducible_bruteforce(unsigned m, std::uint64_t poly_mask) {
    const std::uint32_t f = (1u << m) | static_cast<std::uint32_t>(poly_mask);
    for (unsigned d = 1; 2 * d <= m; ++d)
        for (std::uint32_t g = 1u << d; g < (2u << d); ++g)
            if (poly_mod(f, g) == 0) return false;
    return true;
}

// 64x64 -> 128 carry-less multiplication.
inline u128 clmul64(std::uint64_t a, std::uint64_t b) {
#if defined(__PCLMUL__)
    __m128i va = _mm_set_epi64x(0, static_cast<long long>(a));
    __m128i vb = _mm_set_epi64x(0, static_cast<long long>(b));
    __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
    u128 r = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(p, 8)));
    return (r << 64) | static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
#else
    // 4-bit windowed shift-and-xor
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

std::atomic<std::uint64_t> g_mul_counts[129];
std::atomic<std::uint64_t> g_add_counts[129];

}  // namespace

namespace detail {
std::atomic<bool> g_count_ops{false};

void gf_op_tally_mul(unsigned m) {
    g_mul_counts[m].fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

void gf_op_counting(bool enabled) {
    detail::g_count_ops.store(enabled, std::memory_order_relaxed);
}

bool gf_op_counting_enabled() {
    return detail::g_count_ops.load(std::memory_order_relaxed);
}

void gf_op_reset() {
    for (int i = 0; i <= 128; ++i) {
        g_mul_counts[i].store(0, std::memory_order_relaxed);
        g_add_counts[i].store(0, std::memory_order_relaxed);
    }
}

GfOpCounts gf_op_counts(unsigned m) {
    if (m > 128) throw ContractError("gf_op_counts: degree out of range");
    return GfOpCounts{g_mul_counts[m].load(std::memory_order_relaxed),
                      g_add_counts[m].load(std::memory_order_relaxed)};
}

FieldSpec::FieldSpec(unsigned m, std::uint64_t poly_lo, std::uint64_t poly_hi)
    : m_(m), poly_lo_(poly_lo), poly_hi_(poly_hi) {
    if (m < 1 || m > 128)
        throw ContractError("FieldSpec: extension degree must be in 1..128, got " +
                            std::to_string(m));
    // the mask must fit below x^m and carry a constant term
    if (m <= 64) {
        if (poly_hi != 0 || (m < 64 && poly_lo >> m != 0))
            throw ContractError("FieldSpec: reduction polynomial mask exceeds degree");
    } else if (m < 128 && poly_hi >> (m - 64) != 0) {
        throw ContractError("FieldSpec: reduction polynomial mask exceeds degree");
    }
    if ((poly_lo & 1) == 0)
        throw ContractError("FieldSpec: reduction polynomial needs a constant term");
    if (m <= 16 && !is_irreducible_bruteforce(m, poly_lo))
        throw ContractError("FieldSpec: polynomial is reducible over GF(2)");
    build_fold_table();
}

FieldSpec FieldSpec::standard(unsigned m) {
    if (m < 1 || m > 128)
        throw ContractError("FieldSpec::standard: degree must be in 1..128");
    const std::uint64_t mask = kStandardPoly[m - 1];
    return FieldSpec(m, mask, 0);
}

void FieldSpec::build_fold_table() {
    // fold_[j] = x^(m+j) mod poly
    std::uint64_t lo = poly_lo_, hi = poly_hi_;
    for (unsigned j = 0; j < 128; ++j) {
        fold_[j] = {lo, hi};
        // multiply by x, fold x^m back down
        const bool top = (m_ <= 64) ? ((lo >> (m_ - 1)) & 1) : ((hi >> (m_ - 65)) & 1);
        hi = (hi << 1) | (lo >> 63);
        lo <<= 1;
        if (m_ <= 64) {
            lo &= (m_ == 64) ? ~0ull : ((1ull << m_) - 1);
            hi = 0;
        } else {
            hi &= (m_ == 128) ? ~0ull : ((1ull << (m_ - 64)) - 1);
        }
        if (top) {
            lo ^= poly_lo_;
            hi ^= poly_hi_;
        }
    }
}

FieldElement FieldSpec::element(std::uint64_t lo, std::uint64_t hi) const {
    const bool fits = (m_ <= 64) ? (hi == 0 && (m_ == 64 || lo >> m_ == 0))
                                 : (m_ == 128 || hi >> (m_ - 64) == 0);
    if (!fits)
        throw ContractError("FieldSpec::element: value does not fit in " + std::to_string(m_) +
                            " bits");
    return FieldElement{lo, hi, static_cast<std::uint8_t>(m_)};
}

FieldElement FieldSpec::add(FieldElement a, FieldElement b) const {
    if (a.m != m_ || b.m != m_)
        throw ContractError("gf_add: field degree mismatch");
    if (detail::g_count_ops.load(std::memory_order_relaxed))
        g_add_counts[m_].fetch_add(1, std::memory_order_relaxed);
    return FieldElement{a.lo ^ b.lo, a.hi ^ b.hi, a.m};
}

FieldElement FieldSpec::mul_ref(FieldElement a, FieldElement b) const {
    if (a.m != m_ || b.m != m_)
        throw ContractError("gf_mul: field degree mismatch");
    if (detail::g_count_ops.load(std::memory_order_relaxed))
        g_mul_counts[m_].fetch_add(1, std::memory_order_relaxed);
    std::uint64_t alo = a.lo, ahi = a.hi;
    std::uint64_t rlo = 0, rhi = 0;
    for (unsigned i = 0; i < m_; ++i) {
        const bool bit = (i < 64) ? ((b.lo >> i) & 1) : ((b.hi >> (i - 64)) & 1);
        if (bit) {
            rlo ^= alo;
            rhi ^= ahi;
        }
        // a <<= 1 (mod poly)
        const bool top = (m_ <= 64) ? ((alo >> (m_ - 1)) & 1) : ((ahi >> (m_ - 65)) & 1);
        ahi = (ahi << 1) | (alo >> 63);
        alo <<= 1;
        if (m_ <= 64) {
            alo &= (m_ == 64) ? ~0ull : ((1ull << m_) - 1);
            ahi = 0;
        } else {
            ahi &= (m_ == 128) ? ~0ull : ((1ull << (m_ - 64)) - 1);
        }
        if (top) {
            alo ^= poly_lo_;
            ahi ^= poly_hi_;
        }
    }
    return FieldElement{rlo, rhi, a.m};
}

FieldElement FieldSpec::mul(FieldElement a, FieldElement b) const {
    if (a.m != m_ || b.m != m_)
        throw ContractError("gf_mul: field degree mismatch");
    if (detail::g_count_ops.load(std::memory_order_relaxed))
        g_mul_counts[m_].fetch_add(1, std::memory_order_relaxed);

    // carry-less product, up to 255 bits in w[0..3]
    std::uint64_t w[4] = {0, 0, 0, 0};
    const u128 p00 = clmul64(a.lo, b.lo);
    w[0] ^= static_cast<std::uint64_t>(p00);
    w[1] ^= static_cast<std::uint64_t>(p00 >> 64);
    if (m_ > 64) {
        const u128 p01 = clmul64(a.lo, b.hi) ^ clmul64(a.hi, b.lo);
        const u128 p11 = clmul64(a.hi, b.hi);
        w[1] ^= static_cast<std::uint64_t>(p01);
        w[2] ^= static_cast<std::uint64_t>(p01 >> 64) ^ static_cast<std::uint64_t>(p11);
        w[3] ^= static_cast<std::uint64_t>(p11 >> 64);
    }

    // split into low m bits and the excess above x^m
    std::uint64_t rlo, rhi;
    std::uint64_t elo, ehi;  // excess, at most m-1 bits
    if (m_ <= 64) {
        rlo = (m_ == 64) ? w[0] : (w[0] & ((1ull << m_) - 1));
        rhi = 0;
        elo = (m_ == 64) ? w[1] : ((w[0] >> m_) | (w[1] << (64 - m_)));
        ehi = (m_ == 64) ? 0 : (w[1] >> m_);
    } else {
        rlo = w[0];
        rhi = (m_ == 128) ? w[1] : (w[1] & ((1ull << (m_ - 64)) - 1));
        const unsigned s = m_ - 64;
        if (s == 64) {
            elo = w[2];
            ehi = w[3];
        } else {
            elo = (w[1] >> s) | (w[2] << (64 - s));
            ehi = (w[2] >> s) | (w[3] << (64 - s));
        }
    }

    // fold the excess: bit j of excess adds x^(m+j) mod poly
    while (elo != 0) {
        const int j = std::countr_zero(elo);
        rlo ^= fold_[j][0];
        rhi ^= fold_[j][1];
        elo &= elo - 1;
    }
    while (ehi != 0) {
        const int j = std::countr_zero(ehi);
        rlo ^= fold_[64 + j][0];
        rhi ^= fold_[64 + j][1];
        ehi &= ehi - 1;
    }
    return FieldElement{rlo, rhi, a.m};
}

FieldElement FieldSpec::poly_eval(std::span<const FieldElement> coeffs, FieldElement x) const {
    if (coeffs.empty()) return zero();
    FieldElement acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;)
        acc = add(mul(acc, x), coeffs[i]);
    return acc;
}

FieldElement FieldSpec::element_from_bits(const BitVector& v, std::size_t offset) const {
    std::uint64_t lo = 0, hi = 0;
    for (unsigned j = 0; j < m_; ++j) {
        const std::size_t src = offset + j;
        if (src >= v.size()) break;
        if (!v.bit(src)) continue;
        const unsigned pos = m_ - 1 - j;  // first bit is the MSB
        if (pos < 64)
            lo |= 1ull << pos;
        else
            hi |= 1ull << (pos - 64);
    }
    return FieldElement{lo, hi, static_cast<std::uint8_t>(m_)};
}

}  // namespace qrx
