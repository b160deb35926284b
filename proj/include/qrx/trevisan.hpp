#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrx/bitstream.hpp"
#include "qrx/gf2m.hpp"

namespace qrx {

/// Parameter bundle for Trevisan's extractor with the Reed-Solomon/Hadamard
/// one-bit extractor and a block Nisan-Wigderson design.
///
///   m_e = ceil(log2 n_i + 2 log2 n_f - 2 log2 eps + 4)   (RS field degree)
///   m_d = ceil(log2(2 m_e))                              (design field degree)
///   b   = ceil(log2 n_f) - m_d + 1                       (seed blocks)
///   d   = 2^(2 m_d) * b                                  (seed bits)
struct TrevisanParams {
    std::uint64_t n_i = 0;      // input bits
    std::uint64_t n_f = 0;      // output bits
    double k = 0.0;             // input min-entropy
    double epsilon_log2 = 0.0;
    unsigned m_e = 0;
    unsigned m_d = 0;
    unsigned b = 0;
    std::uint64_t d = 0;        // total seed bits
    double rho = 0.0;
    unsigned n_bar_log2 = 0;    // log2 of the codeword length, = 2 * m_e
};

/// Solves the parameter bundle for a power-of-two (n_i, n_f) pair.
/// When epsilon_log2 is absent, m_e is the smallest power of two whose
/// induced security parameter eps = sqrt(2^(4 - m_e) * n_i * n_f^2) is at
/// most 2^-40; the induced eps is then adopted. When k is absent it defaults
/// to n_i. Throws SizingError on inconsistent inputs (n_f > k, m_e > 256, no
/// positive block count).
TrevisanParams solve_trevisan_params(std::uint64_t n_i, std::uint64_t n_f,
                                     std::optional<double> epsilon_log2 = std::nullopt,
                                     std::optional<double> k = std::nullopt);

/// Extraction ratio rho = [k - 3*log2(n_f/eps) - d - 3] / n_f. Values below 1
/// mean the output length is not fully covered by certified min-entropy.
double trevisan_rho(double k, std::uint64_t n_f, double epsilon_log2, std::uint64_t d);

/// One Reed-Solomon symbol: the message, split into ceil(n_i/m_e) chunks of
/// m_e bits (chunk 0 = constant coefficient, final chunk zero-padded), forms
/// a polynomial that is evaluated at alpha.
FieldElement rs_symbol(const BitVector& message, FieldElement alpha, const FieldSpec& field);

/// Message split into polynomial coefficients, constant term first.
std::vector<FieldElement> rs_coefficients(const BitVector& message, const FieldSpec& field);

/// One bit of the concatenated RS/Hadamard codeword, indexed by u = alpha||r
/// (each m_e bits, MSB-first): inner product of rs_symbol(message, alpha)
/// with r. Evaluates the 2^(2 m_e)-bit codeword without materializing it.
int codeword_bit(const BitVector& message, const BitVector& u, const FieldSpec& field);

struct DesignBlockInfo {
    unsigned block = 0;  // 1-based; polynomials in it have degree < block
    std::uint64_t first_set = 0;
    std::uint64_t count = 0;
    std::uint64_t seed_offset = 0;
};

/// Block weak design: n_f subsets of seed indices, 2*m_e indices each.
/// Block t (1-based) spans seed segment [(t-1)*q^2, t*q^2) with q = 2^m_d and
/// hosts the graphs of distinct polynomials over GF(q) of degree < t,
/// enumerated by increasing integer encoding (base-q digits = coefficients).
/// Block 1 holds min(q, n_f) sets, block t >= 2 holds floor(n_f / 2^(t-1)),
/// so within every block sum_{j<i} 2^|S_i ∩ S_j| <= n_f.
class WeakDesign {
public:
    static WeakDesign build(const TrevisanParams& params);

    std::uint64_t set_count() const { return n_f_; }
    std::size_t set_size() const { return set_size_; }
    std::uint64_t seed_bits() const { return d_; }
    unsigned block_count() const { return static_cast<unsigned>(blocks_.size()); }

    /// 1-based block index hosting set i.
    unsigned block_of(std::uint64_t i) const;

    /// Capacity schedule, one entry per non-empty block.
    std::vector<DesignBlockInfo> block_summary() const;

    /// Fills out with the 2*m_e seed indices of set i, ordered by column.
    /// Sets are regenerated on demand; nothing is stored per set.
    void indices_of(std::uint64_t i, std::vector<std::uint64_t>& out) const;

    std::vector<std::uint64_t> indices_of(std::uint64_t i) const;

private:
    struct Block {
        unsigned degree = 0;          // polynomials of degree < this
        std::uint64_t first_set = 0;
        std::uint64_t count = 0;
        std::uint64_t seed_offset = 0;
    };

    std::uint64_t n_f_ = 0;
    std::uint64_t d_ = 0;
    std::uint64_t q_ = 0;
    unsigned m_d_ = 0;
    std::size_t set_size_ = 0;
    std::vector<Block> blocks_;
    std::vector<std::uint16_t> mul_table_;  // q*q products in GF(q)

    std::uint16_t gf_small_mul(std::uint16_t a, std::uint16_t b) const;
};

/// Runs Trevisan's extractor: output bit i is the codeword bit of the message
/// at the seed positions of design set i. Output bits are independent, so
/// n_threads > 1 splits them across workers; the result is bit-identical to
/// the sequential order. RS symbols are memoized per alpha.
BitVector trevisan_extract(const BitVector& message, const BitVector& seed,
                           const TrevisanParams& params, const WeakDesign& design,
                           unsigned n_threads = 1);

}  // namespace qrx
