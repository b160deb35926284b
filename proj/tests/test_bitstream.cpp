#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "qrx/bitstream.hpp"
#include "qrx/errors.hpp"

using namespace qrx;

namespace {

BitVector random_bits(std::mt19937_64& rng, std::size_t n) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i) v.set_bit(i, rng() & 1);
    return v;
}

// independent slow route: bit-by-bit AND + sum mod 2
int ip_oracle(const BitVector& a, const BitVector& b) {
    int acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= (a.bit(i) & b.bit(i));
    return acc;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/qrx_test_") + name + "_" + std::to_string(::getpid());
}

}  // namespace

TEST_CASE("bit layout is MSB-first within bytes") {
    BitVector v = BitVector::from_string("10110000");
    CHECK(v.bytes()[0] == 0xB0);
    CHECK(v.bit(0));
    CHECK_FALSE(v.bit(1));
    BitVector w(4);
    w.set_bit(0, true);
    CHECK(w.bytes()[0] == 0x80);
}

TEST_CASE("trailing bits stay zero") {
    const std::uint8_t raw[] = {0xFF};
    BitVector v = BitVector::from_bytes(raw, 4);
    CHECK(v.bytes()[0] == 0xF0);
    CHECK(v.to_string() == "1111");
}

TEST_CASE("gather examples") {
    const BitVector v = BitVector::from_string("1011");
    const std::uint64_t rep[] = {0, 0, 0};
    CHECK(gather(v, rep).to_string() == "111");
    const std::uint64_t rev[] = {3, 2, 1, 0};
    CHECK(gather(v, rev).to_string() == "1101");
    CHECK(gather(v, {}).size() == 0);
}

TEST_CASE("gather names the offending position") {
    const BitVector v = BitVector::from_string("1011");
    const std::uint64_t bad[] = {1, 7};
    CHECK_THROWS_WITH_AS(gather(v, bad), doctest::Contains("7"), ContractError);
}

TEST_CASE("gather composes") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 50; ++round) {
        const BitVector v = random_bits(rng, 1 + rng() % 200);
        std::vector<std::uint64_t> p(rng() % 64), q(rng() % 64);
        for (auto& x : p) x = rng() % v.size();
        if (p.empty()) q.clear();
        for (auto& x : q) x = rng() % std::max<std::size_t>(p.size(), 1);
        std::vector<std::uint64_t> pq(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) pq[j] = p[q[j]];
        CHECK(gather(gather(v, p), q) == gather(v, pq));
    }
}

TEST_CASE("inner product examples and oracle") {
    CHECK(inner_product_gf2(BitVector::from_string("1111"), BitVector::from_string("0000")) == 0);
    // 1101 & 1011 = 1001, two ones -> even parity
    CHECK(inner_product_gf2(BitVector::from_string("1101"), BitVector::from_string("1011")) == 0);
    CHECK(inner_product_gf2(BitVector::from_string("1"), BitVector::from_string("1")) == 1);
    CHECK_THROWS_AS(
        inner_product_gf2(BitVector::from_string("10"), BitVector::from_string("100")),
        ContractError);

    std::mt19937_64 rng(22);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 1 + rng() % 300;
        const BitVector a = random_bits(rng, n), b = random_bits(rng, n);
        CHECK(inner_product_gf2(a, b) == ip_oracle(a, b));
    }
}

TEST_CASE("inner product is bilinear") {
    std::mt19937_64 rng(33);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 1 + rng() % 256;
        const BitVector a = random_bits(rng, n), a2 = random_bits(rng, n),
                        b = random_bits(rng, n);
        CHECK(inner_product_gf2(xor_bits(a, a2), b) ==
              (inner_product_gf2(a, b) ^ inner_product_gf2(a2, b)));
    }
}

TEST_CASE("native file roundtrip") {
    std::mt19937_64 rng(44);
    const std::string path = temp_path("native");
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{7}, std::size_t{8},
                          std::size_t{9}, std::size_t{63}, std::size_t{64}, std::size_t{65},
                          std::size_t{3230}, std::size_t{1000000}}) {
        const BitVector v = random_bits(rng, n);
        write_bits(v, path);
        CHECK(read_bits(path) == v);
    }
    std::remove(path.c_str());
}

TEST_CASE("empty native file is magic plus header") {
    const std::string path = temp_path("empty");
    write_bits(BitVector(), path);
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    CHECK(f.tellg() == 12);
    CHECK(read_bits(path).size() == 0);
    std::remove(path.c_str());
}

TEST_CASE("raw mode") {
    const std::string path = temp_path("raw");
    std::mt19937_64 rng(55);
    const BitVector v = random_bits(rng, 128);
    write_bits(v, path, BitFileFormat::raw);
    CHECK(read_bits(path, BitFileFormat::raw) == v);
    CHECK_THROWS_AS(write_bits(random_bits(rng, 13), path, BitFileFormat::raw), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("truncated or corrupt native files are rejected") {
    const std::string path = temp_path("trunc");
    {
        std::ofstream f(path, std::ios::binary);
        f.write("RXBV\x01\x02", 6);
    }
    CHECK_THROWS_AS(read_bits(path), FormatError);
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write("NOPE\x00\x00\x00\x00\x00\x00\x00\x00", 12);
    }
    CHECK_THROWS_AS(read_bits(path), FormatError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_bits("/nonexistent/qrx/file"), IoError);
}

TEST_CASE("word view roundtrip") {
    std::mt19937_64 rng(66);
    for (std::size_t n : {std::size_t{1}, std::size_t{64}, std::size_t{65}, std::size_t{777}}) {
        const BitVector v = random_bits(rng, n);
        CHECK(from_words_lsb(to_words_lsb(v), n) == v);
    }
}
