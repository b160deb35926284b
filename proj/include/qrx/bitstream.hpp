#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrx {

/// Packed bit sequence. Bit i lives in byte i/8 at position 7 - i%8
/// (MSB-first within each byte), so hex dumps read left to right.
/// Unused trailing bits of the last byte are always zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t length_bits);

    /// Takes the first length_bits of the byte sequence; trailing bits of the
    /// final byte are cleared.
    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t length_bits);

    /// Parses a string of '0'/'1' characters, e.g. "10110". Test convenience.
    static BitVector from_string(std::string_view bits);

    std::size_t size() const { return length_bits_; }
    bool empty() const { return length_bits_ == 0; }

    bool bit(std::size_t i) const;
    void set_bit(std::size_t i, bool v);

    const std::vector<std::uint8_t>& bytes() const { return payload_; }

    std::string to_string() const;

    bool operator==(const BitVector&) const = default;

private:
    std::size_t length_bits_ = 0;
    std::vector<std::uint8_t> payload_;
};

/// Picks the bits of v at the given positions, in order. Positions may
/// repeat. Out-of-range positions raise ContractError naming the offender.
BitVector gather(const BitVector& v, std::span<const std::uint64_t> positions);

/// Parity of the bitwise AND of a and b (GF(2) inner product).
/// Lengths must match.
int inner_product_gf2(const BitVector& a, const BitVector& b);

/// Bitwise XOR; lengths must match.
BitVector xor_bits(const BitVector& a, const BitVector& b);

enum class BitFileFormat {
    native,  // "RXBV" magic, u64-le bit count, payload bytes
    raw,     // payload bytes only; length must be a byte multiple
};

void write_bits(const BitVector& v, const std::string& path,
                BitFileFormat format = BitFileFormat::native);
BitVector read_bits(const std::string& path, BitFileFormat format = BitFileFormat::native);

// Word-level view used by the extractor kernels: logical bit i sits at
// word i/64, bit i%64 (LSB-first inside the word).
std::vector<std::uint64_t> to_words_lsb(const BitVector& v);
BitVector from_words_lsb(std::span<const std::uint64_t> words, std::size_t length_bits);

}  // namespace qrx
