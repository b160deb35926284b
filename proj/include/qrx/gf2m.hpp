#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>

#include "qrx/bitstream.hpp"

namespace qrx {

/// Element of GF(2^m), m <= 128. The value is the coefficient mask of a
/// polynomial over GF(2): bit k of (hi:lo) is the coefficient of x^k.
/// Carries its field degree so mixed-field operations can be rejected.
struct FieldElement {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::uint8_t m = 0;

    bool operator==(const FieldElement&) const = default;
    bool is_zero() const { return lo == 0 && hi == 0; }
};

/// A binary extension field GF(2^m) fixed by its reduction polynomial.
/// The polynomial is stored without the leading x^m term, so it always fits
/// in m bits: full polynomial = x^m + poly_lo/poly_hi bits.
class FieldSpec {
public:
    /// Custom field. Irreducibility of the polynomial is brute-force checked
    /// for m <= 16; larger degrees are accepted as given.
    FieldSpec(unsigned m, std::uint64_t poly_lo, std::uint64_t poly_hi = 0);

    /// Field with the built-in reduction polynomial for this degree
    /// (smallest-mask irreducible; m=8 gives x^8+x^4+x^3+x+1, m=128 gives
    /// x^128+x^7+x^2+x+1).
    static FieldSpec standard(unsigned m);

    unsigned degree() const { return m_; }
    std::uint64_t poly_lo() const { return poly_lo_; }
    std::uint64_t poly_hi() const { return poly_hi_; }

    FieldElement element(std::uint64_t lo, std::uint64_t hi = 0) const;
    FieldElement zero() const { return FieldElement{0, 0, static_cast<std::uint8_t>(m_)}; }
    FieldElement one() const { return FieldElement{1, 0, static_cast<std::uint8_t>(m_)}; }

    /// Characteristic-2 addition: bitwise XOR.
    FieldElement add(FieldElement a, FieldElement b) const;

    /// Product modulo the reduction polynomial. Carry-less multiplication
    /// followed by table-driven reduction; agrees bit-exactly with mul_ref.
    FieldElement mul(FieldElement a, FieldElement b) const;

    /// Reference shift-and-XOR multiplication (interleaved reduction).
    FieldElement mul_ref(FieldElement a, FieldElement b) const;

    /// Horner evaluation of sum coeffs[i] * x^i, coefficients constant-term
    /// first. An empty coefficient list evaluates to 0.
    FieldElement poly_eval(std::span<const FieldElement> coeffs, FieldElement x) const;

    /// m-bit chunk of a BitVector starting at bit offset, MSB-first; bits
    /// past the end of v read as zero.
    FieldElement element_from_bits(const BitVector& v, std::size_t offset) const;

private:
    unsigned m_;
    std::uint64_t poly_lo_;
    std::uint64_t poly_hi_;
    // x^(m+j) mod poly for j = 0..127, used to fold product bits >= m.
    std::array<std::array<std::uint64_t, 2>, 128> fold_;

    void build_fold_table();
};

// Per-degree operation counters for the benchmark harness. Disabled by
// default; when enabled, every mul/add is tallied under its field degree.
struct GfOpCounts {
    std::uint64_t mul = 0;
    std::uint64_t add = 0;
};

void gf_op_counting(bool enabled);
bool gf_op_counting_enabled();
void gf_op_reset();
GfOpCounts gf_op_counts(unsigned m);

namespace detail {
// Exposed for tests and the weak-design fast path.
void gf_op_tally_mul(unsigned m);
extern std::atomic<bool> g_count_ops;
}  // namespace detail

}  // namespace qrx
