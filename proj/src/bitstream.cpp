#include "qrx/bitstream.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "qrx/errors.hpp"

namespace qrx {

namespace {
constexpr char kMagic[4] = {'R', 'X', 'B', 'V'};

std::size_t byte_count(std::size_t bits) { return (bits + 7) / 8; }
}  // namespace

BitVector::BitVector(std::size_t length_bits)
    : length_bits_(length_bits), payload_(byte_count(length_bits), 0) {}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length_bits) {
    if (bytes.size() < byte_count(length_bits))
        throw ContractError("from_bytes: byte buffer shorter than bit length");
    BitVector v(length_bits);
    std::memcpy(v.payload_.data(), bytes.data(), byte_count(length_bits));
    // clear unused trailing bits
    if (length_bits % 8 != 0)
        v.payload_.back() &= static_cast<std::uint8_t>(0xFF << (8 - length_bits % 8));
    return v;
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw ContractError("from_string: expected only '0'/'1' characters");
        v.set_bit(i, bits[i] == '1');
    }
    return v;
}

bool BitVector::bit(std::size_t i) const {
    if (i >= length_bits_)
        throw ContractError("bit index " + std::to_string(i) + " out of range (length " +
                            std::to_string(length_bits_) + ")");
    return (payload_[i / 8] >> (7 - i % 8)) & 1u;
}

void BitVector::set_bit(std::size_t i, bool v) {
    if (i >= length_bits_)
        throw ContractError("bit index " + std::to_string(i) + " out of range (length " +
                            std::to_string(length_bits_) + ")");
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
    if (v)
        payload_[i / 8] |= mask;
    else
        payload_[i / 8] &= static_cast<std::uint8_t>(~mask);
}

std::string BitVector::to_string() const {
    std::string s(length_bits_, '0');
    for (std::size_t i = 0; i < length_bits_; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

BitVector gather(const BitVector& v, std::span<const std::uint64_t> positions) {
    BitVector out(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (positions[j] >= v.size())
            throw ContractError("gather: position " + std::to_string(positions[j]) +
                                " out of range (length " + std::to_string(v.size()) + ")");
        out.set_bit(j, v.bit(positions[j]));
    }
    return out;
}

int inner_product_gf2(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size())
        throw ContractError("inner_product_gf2: length mismatch (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
    const auto& pa = a.bytes();
    const auto& pb = b.bytes();
    // trailing bits are zero by invariant, so whole-byte AND is safe
    unsigned acc = 0;
    std::size_t i = 0;
    for (; i + 8 <= pa.size(); i += 8) {
        std::uint64_t wa, wb;
        std::memcpy(&wa, pa.data() + i, 8);
        std::memcpy(&wb, pb.data() + i, 8);
        acc ^= static_cast<unsigned>(std::popcount(wa & wb));
    }
    for (; i < pa.size(); ++i)
        acc ^= static_cast<unsigned>(std::popcount(static_cast<unsigned>(pa[i] & pb[i])));
    return static_cast<int>(acc & 1u);
}

BitVector xor_bits(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size())
        throw ContractError("xor_bits: length mismatch");
    BitVector out(a.size());
    auto bytes = a.bytes();
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] ^= b.bytes()[i];
    return BitVector::from_bytes(bytes, a.size());
}

void write_bits(const BitVector& v, const std::string& path, BitFileFormat format) {
    if (format == BitFileFormat::raw && v.size() % 8 != 0)
        throw FormatError("raw format requires a byte-multiple bit length, got " +
                          std::to_string(v.size()));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    if (format == BitFileFormat::native) {
        f.write(kMagic, 4);
        std::uint64_t n = v.size();
        char hdr[8];
        for (int i = 0; i < 8; ++i) hdr[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
        f.write(hdr, 8);
    }
    f.write(reinterpret_cast<const char*>(v.bytes().data()),
            static_cast<std::streamsize>(v.bytes().size()));
    if (!f) throw IoError("write failed: " + path);
}

BitVector read_bits(const std::string& path, BitFileFormat format) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    if (format == BitFileFormat::raw)
        return BitVector::from_bytes(data, data.size() * 8);
    if (data.size() < 12) throw FormatError("truncated native bit file: " + path);
    if (std::memcmp(data.data(), kMagic, 4) != 0)
        throw FormatError("bad magic in native bit file: " + path);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(data[4 + i]) << (8 * i);
    if (data.size() - 12 < (n + 7) / 8)
        throw FormatError("native bit file shorter than its header claims: " + path);
    return BitVector::from_bytes(std::span(data).subspan(12), n);
}

std::vector<std::uint64_t> to_words_lsb(const BitVector& v) {
    std::vector<std::uint64_t> words((v.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.bit(i)) words[i / 64] |= std::uint64_t{1} << (i % 64);
    return words;
}

BitVector from_words_lsb(std::span<const std::uint64_t> words, std::size_t length_bits) {
    BitVector v(length_bits);
    for (std::size_t i = 0; i < length_bits; ++i)
        if ((words[i / 64] >> (i % 64)) & 1u) v.set_bit(i, true);
    return v;
}

}  // namespace qrx
