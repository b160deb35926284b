#include <doctest.h>

#include <cstring>

#include "qrx/config.hpp"
#include "qrx/errors.hpp"

using namespace qrx;

TEST_CASE("parse accepts comments, blanks and whitespace") {
    const std::string text =
        "# model\n"
        "\n"
        "gamma = 2.5\n"
        "  adc_bits=8  \n"
        "in=/tmp/raw.bin\n";
    const PipelineConfig cfg = PipelineConfig::parse(text);
    CHECK(cfg.get_double("gamma") == 2.5);
    CHECK(cfg.get_u64("adc_bits") == 8);
    CHECK(cfg.get_string("in") == "/tmp/raw.bin");
}

TEST_CASE("canonical form re-serializes byte-identically") {
    PipelineConfig cfg;
    cfg.set("nf", "16384");
    cfg.set("gamma", "1.25");
    cfg.set("extractor", "trevisan");
    const std::string canon = cfg.serialize();
    // sorted keys, one per line
    CHECK(canon == "extractor=trevisan\ngamma=1.25\nnf=16384\n");
    CHECK(PipelineConfig::parse(canon).serialize() == canon);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    CHECK_THROWS_WITH_AS(PipelineConfig::parse("gama=1\n"), doctest::Contains("gama"),
                         ContractError);
    CHECK_THROWS_AS(PipelineConfig::parse("gamma 1\n"), ContractError);
}

TEST_CASE("typed getters validate") {
    PipelineConfig cfg = PipelineConfig::parse("gamma=abc\nthreads=4x\nni=32768\n");
    CHECK_THROWS_AS(cfg.get_double("gamma"), ContractError);
    CHECK_THROWS_AS(cfg.get_u64("threads"), ContractError);
    CHECK(cfg.get_u64("ni") == 32768);
    CHECK_THROWS_AS(cfg.get_double("alpha"), ContractError);  // missing
    CHECK(cfg.get_double_or("alpha", 0.01) == 0.01);
    CHECK(cfg.get_u64_or("blocks", 7) == 7);
    CHECK(cfg.get_u64_opt("nf") == std::nullopt);
    CHECK(cfg.get_u64_opt("ni") == std::uint64_t{32768});
}

TEST_CASE("fnv1a test vectors") {
    CHECK(fnv1a_hex("", 0) == "cbf29ce484222325");
    CHECK(fnv1a_hex("a", 1) == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar", 6) == "85944171f73967e8");
}
