// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "qrx/bitstream.hpp"
#include "qrx/entropy.hpp"
#include "qrx/errors.hpp"
#include "qrx/gf2m.hpp"
#include "qrx/simulator.hpp"
#include "qrx/stattests.hpp"
#include "qrx/toeplitz.hpp"
#include "qrx/trevisan.hpp"

using namespace qrx;
using json = nlohmann::json;

namespace {

struct Failure : std::runtime_error {
    explicit Failure(const std::string& msg) : std::runtime_error(msg) {}
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure(msg);
}

BitVector random_bits(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> bytes((n + 7) / 8);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    return BitVector::from_bytes(bytes, n);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---- criterion bodies ----------------------------------------------------

std::string c1_parameter_reproduction() {
    const TrevisanParams p = solve_trevisan_params(1ull << 15, 1ull << 14);
    require(p.m_e == 128, fmt("m_e = %u, want 128", p.m_e));
    require(p.m_d == 8, fmt("m_d = %u, want 8", p.m_d));
    require(p.b == 7, fmt("b = %u, want 7", p.b));
    require(p.d == 458752, fmt("d = %llu, want 458752", (unsigned long long)p.d));
    return "m_e=128 m_d=8 b=7 d=458752";
}

std::string c2_toeplitz_sizing() {
    const std::uint64_t m = toeplitz_output_length(3430.0, -100.0);
    require(m == 3230, fmt("m = %llu, want 3230", (unsigned long long)m));
    const ToeplitzParams p = make_toeplitz_params(4096, 3430.0, -100.0);
    require(p.seed_bits() == 7325, fmt("seed = %llu, want 7325", (unsigned long long)p.seed_bits()));
    return "m=3230 seed_bits=7325";
}

std::string c3_photon_bound() {
    const double bits = photon_bound(0.95e-3, 1550e-9, 200e-12);
    require(std::abs(bits - 20.5) <= 0.1, fmt("bound = %.4f, want 20.5 +- 0.1", bits));
    return fmt("bound=%.3f bits", bits);
}

std::string c4_two_universality() {
    int worst = 0;
    for (unsigned x = 0; x < 8; ++x)
        for (unsigned y = x + 1; y < 8; ++y) {
            int collisions = 0;
            for (unsigned s = 0; s < 16; ++s) {
                BitVector seed(4), vx(3), vy(3);
                for (int b = 0; b < 4; ++b) seed.set_bit(b, (s >> (3 - b)) & 1);
                for (int b = 0; b < 3; ++b) {
                    vx.set_bit(b, (x >> (2 - b)) & 1);
                    vy.set_bit(b, (y >> (2 - b)) & 1);
                }
                collisions += toeplitz_extract(seed, vx, 2) == toeplitz_extract(seed, vy, 2);
            }
            require(collisions <= 4, fmt("pair (%u,%u): %d/16 collisions > 1/4", x, y, collisions));
            worst = std::max(worst, collisions);
        }
    return fmt("worst collision probability %d/16 <= 1/4", worst);
}

std::string c5_leftover_hash_toy() {
    const unsigned subset[4] = {0x3, 0x5, 0x9, 0xE};  // k = 2 source
    int counts[32] = {};
    for (unsigned s = 0; s < 16; ++s) {
        BitVector seed(4);
        for (int b = 0; b < 4; ++b) seed.set_bit(b, (s >> (3 - b)) & 1);
        for (unsigned xv : subset) {
            BitVector x(4);
            for (int b = 0; b < 4; ++b) x.set_bit(b, (xv >> (3 - b)) & 1);
            ++counts[toeplitz_extract(seed, x, 1).bit(0) * 16 + s];
        }
    }
    int l1 = 0;
    for (int c : counts) l1 += std::abs(c - 2);  // units of 1/64
    const double sd = static_cast<double>(l1) / 128.0;
    require(sd <= std::pow(2.0, -0.5) + 1e-15,
            fmt("statistical distance %.6f > 2^-1/2", sd));
    return fmt("exact distance %.6f <= 0.707107", sd);
}

std::string c6_weak_design_contract() {
    // exhaustive at q = 4 for every constructible n_f <= 16
    int verified = 0;
    for (std::uint64_t nf = 3; nf <= 16; ++nf) {
        TrevisanParams p;
        p.n_i = 64;
        p.n_f = nf;
        p.k = 64.0;
        p.m_e = 2;
        p.m_d = 2;
        const unsigned lognf = static_cast<unsigned>(std::bit_width(nf - 1));
        if (lognf < 2) continue;
        p.b = lognf - 1;
        p.d = 16ull * p.b;
        p.n_bar_log2 = 4;
        std::vector<std::vector<std::uint64_t>> sets;
        try {
            const WeakDesign wd = WeakDesign::build(p);
            for (std::uint64_t i = 0; i < nf; ++i) sets.push_back(wd.indices_of(i));
            for (std::uint64_t i = 0; i < nf; ++i) {
                double sum = 0.0;
                for (std::uint64_t j = 0; j < i; ++j) {
                    if (wd.block_of(i) != wd.block_of(j)) continue;
                    std::vector<std::uint64_t> inter;
                    std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(),
                                          sets[j].end(), std::back_inserter(inter));
                    sum += std::pow(2.0, static_cast<double>(inter.size()));
                }
                require(sum <= static_cast<double>(nf) + 1e-12,
                        fmt("n_f=%llu set %llu: overlap sum %.1f > n_f",
                            (unsigned long long)nf, (unsigned long long)i, sum));
            }
            ++verified;
        } catch (const ContractError&) {
            // the capacity schedule exactly fills powers of two; n_f = 15 is
            // the one size in range it cannot place
            require(nf == 15, fmt("unexpected construction failure at n_f=%llu",
                                  (unsigned long long)nf));
        }
    }
    require(verified == 13, fmt("verified %d of 13 constructible sizes", verified));

    // sampled at the 2^15 -> 2^14 scale: same-block overlaps never exceed the
    // polynomial degree bound
    const TrevisanParams p = solve_trevisan_params(1ull << 15, 1ull << 14);
    const WeakDesign wd = WeakDesign::build(p);
    std::mt19937_64 rng(4242);
    std::vector<std::uint64_t> a, b;
    std::uint64_t checked = 0;
    std::size_t worst = 0;
    while (checked < 100000) {
        const std::uint64_t i = rng() % p.n_f, j = rng() % p.n_f;
        if (i == j || wd.block_of(i) != wd.block_of(j)) continue;
        wd.indices_of(i, a);
        wd.indices_of(j, b);
        std::vector<std::uint64_t> inter;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(inter));
        const std::size_t bound = wd.block_of(i) - 1;
        require(inter.size() <= bound,
                fmt("sets %llu,%llu overlap %zu > degree bound %zu", (unsigned long long)i,
                    (unsigned long long)j, inter.size(), bound));
        worst = std::max(worst, inter.size());
        ++checked;
    }
    return fmt("13 exhaustive sizes + 100000 sampled pairs, worst overlap %zu", worst);
}

std::string c7_code_distance() {
    // explicit table oracle lives in the unit tests; here the implementation
    // path enumerates full codewords, exhaustively over all message pairs
    const FieldSpec gf4 = FieldSpec::standard(2);
    std::vector<std::vector<int>> words(16, std::vector<int>(16));
    for (unsigned msg = 0; msg < 16; ++msg) {
        BitVector mv(4);
        for (int b = 0; b < 4; ++b) mv.set_bit(b, (msg >> (3 - b)) & 1);
        for (unsigned u = 0; u < 16; ++u) {
            BitVector uv(4);
            for (int b = 0; b < 4; ++b) uv.set_bit(b, (u >> (3 - b)) & 1);
            words[msg][u] = codeword_bit(mv, uv, gf4);
        }
    }
    int min_dist = 16;
    for (unsigned x = 0; x < 16; ++x)
        for (unsigned y = x + 1; y < 16; ++y) {
            int dist = 0;
            for (int i = 0; i < 16; ++i) dist += words[x][i] != words[y][i];
            min_dist = std::min(min_dist, dist);
        }
    require(min_dist >= 6, fmt("minimum distance %d/16 < 3/8", min_dist));
    return fmt("minimum relative distance %d/16 >= 6/16", min_dist);
}

std::string c8_oracle_equivalence() {
    std::mt19937_64 rng(808);
    for (int round = 0; round < 1000; ++round) {
        const std::uint64_t n = 1 + rng() % 4096;
        const std::uint64_t m = 1 + rng() % std::min<std::uint64_t>(n, 3230);
        const BitVector input = random_bits(rng, n);
        const BitVector seed = random_bits(rng, n + m - 1);
        if (toeplitz_extract(seed, input, m) != toeplitz_extract_ref(seed, input, m))
            throw Failure(fmt("toeplitz paths diverge at n=%llu m=%llu",
                              (unsigned long long)n, (unsigned long long)m));
    }
    // parallel Trevisan equals sequential
    for (std::uint64_t ni_log : {9, 10}) {
        const TrevisanParams p =
            solve_trevisan_params(1ull << ni_log, 1ull << (ni_log - 1), -4.0);
        const WeakDesign wd = WeakDesign::build(p);
        const BitVector msg = random_bits(rng, p.n_i);
        const BitVector seed = random_bits(rng, p.d);
        const BitVector seq = trevisan_extract(msg, seed, p, wd, 1);
        require(trevisan_extract(msg, seed, p, wd, 4) == seq,
                "parallel Trevisan output differs from sequential");
    }
    return "1000 toeplitz instances + parallel trevisan bit-exact";
}

struct EndToEnd {
    std::string detail;
};

void battery_proportions(const BitVector& bits, const char* label, std::string& detail) {
    const std::uint64_t sequences = 100;
    const std::uint64_t seq_bits = (bits.size() / sequences) & ~std::uint64_t{7};
    std::vector<std::uint64_t> pos(seq_bits);
    std::vector<int> passing;  // per test family
    std::vector<std::string> names;
    for (std::uint64_t s = 0; s < sequences; ++s) {
        for (std::uint64_t j = 0; j < seq_bits; ++j) pos[j] = s * seq_bits + j;
        const auto reports = run_battery(gather(bits, pos), 0.01, 1024);
        if (s == 0) {
            passing.assign(reports.size(), 0);
            for (const auto& r : reports) names.push_back(r.name);
        }
        for (std::size_t t = 0; t < reports.size(); ++t)
            passing[t] += reports[t].p_value >= 0.01;
    }
    require(names.size() == 4, "battery should run all four tests per sequence");
    for (std::size_t t = 0; t < names.size(); ++t) {
        require(passing[t] >= 98, fmt("%s: %s passes %d/100 sequences < 98", label,
                                      names[t].c_str(), passing[t]));
        detail += fmt(" %s:%d", names[t].c_str(), passing[t]);
    }

    const AutocorrReport ac = autocorrelation(bits_as_series(bits), 100);
    const double bound = 3.0 / std::sqrt(static_cast<double>(bits.size()));
    require(std::abs(ac.mean_coefficient) <= bound,
            fmt("%s: |mean autocorr| %.2e > %.2e", label, std::abs(ac.mean_coefficient),
                bound));
    detail += fmt(" autocorr=%.1e(<=%.1e)", std::abs(ac.mean_coefficient), bound);
}

std::string c9_end_to_end() {
    SimConfig cfg;
    cfg.model.gamma = 1.0;
    cfg.model.sigma2_total = 0.01;
    cfg.model.mean = 0.45;
    cfg.model.adc_bits = 8;
    cfg.model.adc_min = 0.0;
    cfg.model.adc_max = 1.0;
    cfg.classical_kind = ClassicalKind::sinusoidal_drift;
    cfg.classical_freq = 1e-3;
    cfg.prng_seed = 20260810;
    cfg.n_samples = 1250000;  // 10^7 raw bits
    const auto samples = simulate(cfg);
    const BitVector raw = samples_to_bits(samples, 8);
    require(raw.size() == 10000000, "raw stream should hold 10^7 bits");

    require(!monobit(raw).pass, "raw data unexpectedly passes monobit");
    require(!chi_square_bytes(raw.bytes()).pass, "raw data unexpectedly passes chi-square");

    // certified per-block min-entropy from the model
    const EntropyReport rep = evaluate_entropy(cfg.model);
    const double k_block = rep.min_entropy_bits * 4096.0 / 8.0;

    std::string detail = fmt("k/block=%.0f;", k_block);

    // Toeplitz leg
    {
        const ToeplitzParams p = make_toeplitz_params(4096, k_block, -100.0);
        std::mt19937_64 seed_rng(99999);
        const BitVector seed = random_bits(seed_rng, p.seed_bits());
        const std::uint64_t blocks = raw.size() / p.n;
        BitVector out(blocks * p.m);
        std::size_t cursor = 0;
        std::vector<std::uint64_t> pos(p.n);
        for (std::uint64_t b = 0; b < blocks; ++b) {
            for (std::uint64_t j = 0; j < p.n; ++j) pos[j] = b * p.n + j;
            const BitVector part = toeplitz_extract(seed, gather(raw, pos), p.m);
            for (std::size_t i = 0; i < part.size(); ++i) out.set_bit(cursor++, part.bit(i));
        }
        detail += " toeplitz";
        battery_proportions(out, "toeplitz", detail);
    }

    // Trevisan leg
    {
        const TrevisanParams p = solve_trevisan_params(4096, 2048, -13.0, k_block);
        const WeakDesign design = WeakDesign::build(p);
        std::mt19937_64 seed_rng(7);
        const BitVector seed = random_bits(seed_rng, p.d);
        const std::uint64_t blocks = raw.size() / p.n_i;
        BitVector out(blocks * p.n_f);
        std::size_t cursor = 0;
        std::vector<std::uint64_t> pos(p.n_i);
        for (std::uint64_t b = 0; b < blocks; ++b) {
            for (std::uint64_t j = 0; j < p.n_i; ++j) pos[j] = b * p.n_i + j;
            const BitVector part = trevisan_extract(gather(raw, pos), seed, p, design);
            for (std::size_t i = 0; i < part.size(); ++i) out.set_bit(cursor++, part.bit(i));
        }
        detail += "; trevisan";
        battery_proportions(out, "trevisan", detail);
    }
    return detail;
}

std::string c10_throughput(const std::string& cli) {
    const std::string out = "/tmp/qrx_acceptance_bench.json";
    // Toeplitz at the published block shape
    int rc = std::system((cli + " bench --toeplitz --blocks 200 > " + out + " 2>/dev/null").c_str());
    require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "cmd_bench --toeplitz failed");
    std::ifstream f1(out);
    json tj;
    f1 >> tj;
    const double toeplitz_rate = tj["output_bits_per_s"].get<double>();
    require(toeplitz_rate >= 441000.0,
            fmt("toeplitz rate %.0f bit/s below the 441 kb/s floor", toeplitz_rate));

    // Trevisan sweep up to n_f = 2^14 with per-n_f GF-op counts
    rc = std::system(
        (cli + " bench --trevisan --ni 32768 --nf 16384 > " + out + " 2>/dev/null").c_str());
    require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "cmd_bench --trevisan failed");
    std::ifstream f2(out);
    json vj;
    f2 >> vj;
    require(vj["rows"].size() == 5, "expected bench rows for log2 n_f = 10..14");
    double trev_rate = 0.0;
    for (const auto& row : vj["rows"]) {
        require(row["design_gf_ops"].get<double>() > 0, "missing design op counts");
        require(row["ecc_gf_mul"].get<double>() > 0, "missing ECC op counts");
        require(row["output_bits_per_s"].get<double>() >= 700.0,
                fmt("trevisan rate %.0f bit/s below the 0.7 kb/s floor at log2_nf=%d",
                    row["output_bits_per_s"].get<double>(), row["log2_nf"].get<int>()));
        if (row["log2_nf"].get<int>() == 14) trev_rate = row["output_bits_per_s"].get<double>();
    }
    std::remove(out.c_str());
    return fmt("toeplitz %.0f kb/s (floor 441), trevisan %.1f kb/s (floor 0.7)",
               toeplitz_rate / 1000.0, trev_rate / 1000.0);
}

std::string c11_entropy_consistency() {
    SimConfig cfg;
    cfg.model.gamma = 1.0;
    cfg.model.sigma2_total = 0.0025;
    cfg.model.mean = 0.5;
    cfg.model.adc_bits = 8;
    cfg.model.adc_min = 0.0;
    cfg.model.adc_max = 1.0;
    cfg.classical_kind = ClassicalKind::gaussian;
    cfg.prng_seed = 111;
    cfg.n_samples = 1000000;
    const auto samples = simulate(cfg);
    const auto probs = bin_probabilities(cfg.model, cfg.model.sigma2_total);
    std::vector<double> hist(256, 0.0);
    for (auto s : samples) hist[s] += 1.0;
    double chi2 = 0.0;
    int dof = -1;
    for (int c = 0; c < 256; ++c) {
        const double expected = probs[c] * static_cast<double>(cfg.n_samples);
        if (expected < 5.0) continue;
        chi2 += (hist[c] - expected) * (hist[c] - expected) / expected;
        ++dof;
    }
    const double p = igamc(static_cast<double>(dof) / 2.0, chi2 / 2.0);
    require(p >= 0.01, fmt("histogram chi-square p = %.4f < 0.01", p));

    std::mt19937_64 rng(333);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int round = 0; round < 10000; ++round) {
        std::vector<double> d(2 + rng() % 64);
        double sum = 0.0;
        for (auto& v : d) sum += (v = uni(rng) + 1e-12);
        for (auto& v : d) v /= sum;
        require(min_entropy(d) <= shannon_entropy(d) + 1e-12,
                "min-entropy exceeded Shannon entropy");
    }
    return fmt("histogram p=%.3f; 10^4 distributions satisfy Hmin <= H", p);
}

}  // namespace

int main() {
    const std::string cli = QRX_CLI_PATH;
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "parameter reproduction (2^15 -> 2^14)", 1.0, c1_parameter_reproduction},
        {2, "toeplitz sizing (k=3430, eps=2^-100)", 1.0, c2_toeplitz_sizing},
        {3, "photon bound (0.95 mW, 1550 nm, 200 ps)", 1.0, c3_photon_bound},
        {4, "two-universality, exhaustive n=3 m=2", 1.0, c4_two_universality},
        {5, "leftover-hash toy bound, exhaustive n=4 m=1 k=2", 1.0, c5_leftover_hash_toy},
        {6, "weak design overlap contract", 60.0, c6_weak_design_contract},
        {7, "concatenated-code distance at m_e=2", 1.0, c7_code_distance},
        {8, "accelerated/naive and parallel/sequential equivalence", 300.0,
         c8_oracle_equivalence},
        {9, "end-to-end statistical behavior on 10^7 bits", 900.0, c9_end_to_end},
        {10, "throughput floors with per-n_f op counts", 600.0,
         [&cli] { return c10_throughput(cli); }},
        {11, "entropy-model consistency", 120.0, c11_entropy_consistency},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string verdict, detail;
        try {
            detail = c.run();
            verdict = "PASS";
        } catch (const std::exception& e) {
            detail = e.what();
            verdict = "FAIL";
            ++failed;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (verdict == "PASS" && secs > c.budget_s) {
            verdict = "FAIL";
            ++failed;
            detail += fmt(" [exceeded %.0f s budget]", c.budget_s);
        }
        std::printf("criterion %2d %s (%7.2f s)  %s: %s\n", c.id, verdict.c_str(), secs,
                    c.name, detail.c_str());
        std::fflush(stdout);
    }
    if (failed == 0) {
        std::printf("ACCEPTANCE: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("ACCEPTANCE: %d criteria FAILED\n", failed);
    return 1;
}
