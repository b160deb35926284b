// qrx: simulate -> model entropy -> solve parameters -> extract -> test.
//
// Exit codes: 0 success, 2 sizing/contract error, 3 I/O or file-format
// error, 4 statistical expectation (negative-control) failure. Every failure
// prints a single machine-parseable line: error[CODE]: message

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrx/bitstream.hpp"
#include "qrx/config.hpp"
#include "qrx/entropy.hpp"
#include "qrx/errors.hpp"
#include "qrx/gf2m.hpp"
#include "qrx/simulator.hpp"
#include "qrx/stattests.hpp"
#include "qrx/toeplitz.hpp"
#include "qrx/trevisan.hpp"

using json = nlohmann::json;
using namespace qrx;

namespace {

struct ExpectationError : std::runtime_error {
    explicit ExpectationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Flag values; unset flags fall back to the config file, then to defaults.
struct Options {
    std::string config_path;
    std::string in_path, out_path, seed_path;
    std::optional<double> k, eps_log2, alpha;
    std::optional<std::uint64_t> n, ni, nf, threads, blocks, sequences, block_len, max_lag;
    std::string format, mode, expect;
    bool use_toeplitz = false;
    bool use_trevisan = false;
};

struct Resolved {
    PipelineConfig cfg;

    double num(const std::optional<double>& flag, const char* key, double fallback) const {
        if (flag) return *flag;
        return cfg.get_double_or(key, fallback);
    }
    std::optional<double> num_opt(const std::optional<double>& flag, const char* key) const {
        if (flag) return flag;
        return cfg.get_double_opt(key);
    }
    std::uint64_t u64(const std::optional<std::uint64_t>& flag, const char* key,
                      std::uint64_t fallback) const {
        if (flag) return *flag;
        return cfg.get_u64_or(key, fallback);
    }
    std::optional<std::uint64_t> u64_opt(const std::optional<std::uint64_t>& flag,
                                         const char* key) const {
        if (flag) return flag;
        return cfg.get_u64_opt(key);
    }
    std::string str(const std::string& flag, const char* key, const std::string& fallback) const {
        if (!flag.empty()) return flag;
        return cfg.get_string_or(key, fallback);
    }
    std::string required_str(const std::string& flag, const char* key) const {
        if (!flag.empty()) return flag;
        if (cfg.has(key)) return cfg.get_string(key);
        throw ContractError(std::string("missing required --") + key + " (or config key '" +
                            key + "')");
    }
};

Resolved resolve(const Options& opt) {
    Resolved r;
    if (!opt.config_path.empty()) r.cfg = PipelineConfig::load(opt.config_path);
    return r;
}

SourceModel model_from(const Resolved& r) {
    SourceModel m;
    m.gamma = r.cfg.get_double("gamma");
    m.sigma2_total = r.cfg.get_double("sigma2_total");
    m.mean = r.cfg.get_double_or("mean", 0.0);
    m.adc_bits = static_cast<unsigned>(r.cfg.get_u64_or("adc_bits", 8));
    m.adc_min = r.cfg.get_double("adc_min");
    m.adc_max = r.cfg.get_double("adc_max");
    m.validate();
    return m;
}

BitFileFormat parse_format(const std::string& s) {
    if (s == "native") return BitFileFormat::native;
    if (s == "raw") return BitFileFormat::raw;
    throw ContractError("unknown format '" + s + "' (expected native or raw)");
}

std::string file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for digest: " + path);
    std::vector<char> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return fnv1a_hex(data.data(), data.size());
}

bool all_zero(const BitVector& v) {
    for (std::uint8_t b : v.bytes())
        if (b != 0) return false;
    return true;
}

void append_bits(BitVector& dst, const BitVector& src, std::size_t& cursor) {
    for (std::size_t i = 0; i < src.size(); ++i) dst.set_bit(cursor++, src.bit(i));
}

// deterministic filler for benchmark fixtures
BitVector pseudo_bits(std::uint64_t seed, std::size_t n) {
    std::vector<std::uint8_t> bytes((n + 7) / 8);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(detail::splitmix64_at(seed, i));
    return BitVector::from_bytes(bytes, n);
}

json params_json(const ToeplitzParams& p) {
    return json{{"extractor", "toeplitz"}, {"n", p.n},
                {"m", p.m},                {"k", p.k},
                {"eps_log2", p.epsilon_log2}, {"seed_bits", p.seed_bits()}};
}

json params_json(const TrevisanParams& p) {
    return json{{"extractor", "trevisan"},
                {"ni", p.n_i},
                {"nf", p.n_f},
                {"k", p.k},
                {"eps_log2", p.epsilon_log2},
                {"m_e", p.m_e},
                {"m_d", p.m_d},
                {"b", p.b},
                {"d", p.d},
                {"rho", p.rho},
                {"n_bar_log2", p.n_bar_log2}};
}

std::vector<std::string> trevisan_warnings(const TrevisanParams& p) {
    std::vector<std::string> w;
    if (p.rho < 1.0)
        w.push_back("rho < 1: output length exceeds the certified extractable entropy for "
                    "this seed length");
    if (static_cast<double>(p.d) > static_cast<double>(p.n_f))
        w.push_back("seed is longer than the output; consider hashing the seed budget");
    return w;
}

int cmd_simulate(const Options& opt) {
    const Resolved r = resolve(opt);
    SimConfig cfg;
    cfg.model = model_from(r);
    cfg.classical_kind =
        classical_kind_from_string(r.cfg.get_string_or("classical_kind", "gaussian"));
    cfg.classical_freq = r.cfg.get_double_or("classical_freq", 1e-3);
    cfg.classical_phase = r.cfg.get_double_or("classical_phase", 0.0);
    cfg.classical_value = r.cfg.get_double_or("classical_value", 0.0);
    cfg.prng_seed = r.cfg.get_u64_or("prng_seed", 0);
    cfg.n_samples = r.cfg.get_u64("n_samples");
    const std::string out = r.required_str(opt.out_path, "out");
    const auto samples = simulate(cfg);
    write_samples(samples, cfg, out);
    std::cout << json{{"command", "simulate"},
                      {"out", out},
                      {"n_samples", cfg.n_samples},
                      {"adc_bits", cfg.model.adc_bits}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_entropy(const Options& opt) {
    const Resolved r = resolve(opt);
    SourceModel model = model_from(r);
    json source = {{"kind", "model"}};
    if (!opt.in_path.empty() || r.cfg.has("in")) {
        // characterize sigma2_total (and the mean) by sampling, as the model
        // assumptions allow
        const std::string in = r.required_str(opt.in_path, "in");
        const auto samples = read_samples(in, model.adc_bits);
        const double width =
            (model.adc_max - model.adc_min) / static_cast<double>(1u << model.adc_bits);
        const auto [mean, var] = sample_variance(samples, width, model.adc_min + width / 2.0);
        model.mean = mean;
        model.sigma2_total = var;
        source = {{"kind", "samples"}, {"path", in}, {"count", samples.size()}};
    }
    const EntropyReport rep = evaluate_entropy(model);
    const std::uint64_t ni = r.u64(opt.ni, "ni", 4096);
    const double k = rep.min_entropy_bits * static_cast<double>(ni) /
                     static_cast<double>(model.adc_bits);
    json out = {{"command", "entropy"},
                {"source", source},
                {"gamma", model.gamma},
                {"sigma2_total", model.sigma2_total},
                {"mean", model.mean},
                {"sigma2_quantum", rep.sigma2_quantum},
                {"min_entropy_bits_per_sample", rep.min_entropy_bits},
                {"shannon_bits_per_sample", rep.shannon_bits},
                {"adc_bits", model.adc_bits},
                {"input_bits", ni},
                {"k", k},
                {"bin_probs", rep.bin_probs}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_params(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string extractor =
        opt.use_toeplitz ? "toeplitz"
                         : (opt.use_trevisan ? "trevisan" : r.cfg.get_string("extractor"));
    json out;
    if (extractor == "toeplitz") {
        const std::uint64_t n = r.u64(opt.n, "n", 4096);
        const auto k = r.num_opt(opt.k, "k");
        if (!k) throw ContractError("toeplitz sizing needs --k");
        const double eps = r.num(opt.eps_log2, "eps_log2", -100.0);
        const ToeplitzParams p = make_toeplitz_params(n, *k, eps);
        out = params_json(p);
        out["warnings"] = json::array();
    } else if (extractor == "trevisan") {
        const std::uint64_t ni = r.u64(opt.ni, "ni", 1ull << 15);
        const std::uint64_t nf = r.u64(opt.nf, "nf", 1ull << 14);
        const TrevisanParams p =
            solve_trevisan_params(ni, nf, r.num_opt(opt.eps_log2, "eps_log2"),
                                  r.num_opt(opt.k, "k"));
        out = params_json(p);
        out["warnings"] = trevisan_warnings(p);
        // design summary: the full index sets are regenerated on demand
        json blocks = json::array();
        for (const auto& blk : WeakDesign::build(p).block_summary())
            blocks.push_back({{"block", blk.block},
                              {"degree_bound", blk.block},
                              {"first_set", blk.first_set},
                              {"sets", blk.count},
                              {"seed_offset", blk.seed_offset}});
        out["design"] = {{"q", 1u << p.m_d}, {"set_size", 2 * p.m_e}, {"blocks", blocks}};
    } else {
        throw ContractError("unknown extractor '" + extractor + "'");
    }
    out["command"] = "params";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_extract(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string extractor =
        opt.use_toeplitz ? "toeplitz"
                         : (opt.use_trevisan ? "trevisan" : r.cfg.get_string("extractor"));
    const std::string in = r.required_str(opt.in_path, "in");
    const std::string out_path = r.required_str(opt.out_path, "out");
    const std::string seed_path = r.required_str(opt.seed_path, "seed_file");
    const BitFileFormat in_format = parse_format(r.str(opt.format, "format", "native"));
    const unsigned threads =
        static_cast<unsigned>(std::max<std::uint64_t>(1, r.u64(opt.threads, "threads", 1)));

    const BitVector input = read_bits(in, in_format);
    const BitVector seed = read_bits(seed_path);
    std::vector<std::string> warnings;
    if (all_zero(input))
        warnings.push_back("degenerate all-zero input: a linear extractor maps it to all "
                           "zeros");

    json manifest{{"tool", "qrx"}, {"command", "extract"}};
    BitVector output;
    std::uint64_t block_bits = 0, blocks_done = 0, dropped = 0;
    double per_block_eps = 0.0;

    if (extractor == "toeplitz") {
        const std::uint64_t n = r.u64(opt.n, "n", 4096);
        const auto k = r.num_opt(opt.k, "k");
        if (!k) throw ContractError("toeplitz extraction needs --k");
        const double eps = r.num(opt.eps_log2, "eps_log2", -100.0);
        const ToeplitzParams p = make_toeplitz_params(n, *k, eps);
        if (seed.size() != p.seed_bits())
            throw ContractError("seed file must hold n+m-1 = " + std::to_string(p.seed_bits()) +
                                " bits, got " + std::to_string(seed.size()));
        block_bits = p.n;
        per_block_eps = p.epsilon_log2;
        std::uint64_t blocks = input.size() / p.n;
        if (auto cap = r.u64_opt(opt.blocks, "blocks")) blocks = std::min(blocks, *cap);
        if (blocks == 0)
            throw SizingError("input shorter than one " + std::to_string(p.n) + "-bit block");
        dropped = input.size() - blocks * p.n;

        // blocks are independent; workers fill their own slots, the
        // concatenation order is fixed by block index
        std::vector<BitVector> parts(blocks);
        auto worker = [&](std::uint64_t first, std::uint64_t last) {
            std::vector<std::uint64_t> pos(p.n);
            for (std::uint64_t b = first; b < last; ++b) {
                for (std::uint64_t j = 0; j < p.n; ++j) pos[j] = b * p.n + j;
                parts[b] = toeplitz_extract(seed, gather(input, pos), p.m);
            }
        };
        if (threads <= 1 || blocks < 2) {
            worker(0, blocks);
        } else {
            const unsigned tcount =
                static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
            std::vector<std::thread> pool;
            const std::uint64_t per = (blocks + tcount - 1) / tcount;
            for (unsigned t = 0; t < tcount; ++t)
                pool.emplace_back(worker, std::min<std::uint64_t>(t * per, blocks),
                                  std::min<std::uint64_t>((t + 1) * per, blocks));
            for (auto& th : pool) th.join();
        }
        output = BitVector(blocks * p.m);
        std::size_t cursor = 0;
        for (const auto& part : parts) append_bits(output, part, cursor);
        blocks_done = blocks;
        manifest["params"] = params_json(p);
    } else if (extractor == "trevisan") {
        const std::uint64_t ni = r.u64(opt.ni, "ni", 1ull << 15);
        const std::uint64_t nf = r.u64(opt.nf, "nf", 1ull << 14);
        const TrevisanParams p =
            solve_trevisan_params(ni, nf, r.num_opt(opt.eps_log2, "eps_log2"),
                                  r.num_opt(opt.k, "k"));
        for (const auto& w : trevisan_warnings(p)) warnings.push_back(w);
        if (seed.size() != p.d)
            throw ContractError("seed file must hold d = " + std::to_string(p.d) +
                                " bits, got " + std::to_string(seed.size()));
        block_bits = p.n_i;
        per_block_eps = p.epsilon_log2;
        std::uint64_t blocks = input.size() / p.n_i;
        if (auto cap = r.u64_opt(opt.blocks, "blocks")) blocks = std::min(blocks, *cap);
        if (blocks == 0)
            throw SizingError("input shorter than one " + std::to_string(p.n_i) + "-bit block");
        dropped = input.size() - blocks * p.n_i;

        const WeakDesign design = WeakDesign::build(p);
        output = BitVector(blocks * p.n_f);
        std::size_t cursor = 0;
        std::vector<std::uint64_t> pos(p.n_i);
        for (std::uint64_t b = 0; b < blocks; ++b) {
            for (std::uint64_t j = 0; j < p.n_i; ++j) pos[j] = b * p.n_i + j;
            append_bits(output, trevisan_extract(gather(input, pos), seed, p, design, threads),
                        cursor);
        }
        blocks_done = blocks;
        manifest["params"] = params_json(p);
    } else {
        throw ContractError("unknown extractor '" + extractor + "'");
    }

    if (dropped > 0)
        warnings.push_back(std::to_string(dropped) + " tail bits short of a full block were "
                                                     "dropped");
    write_bits(output, out_path);
    manifest["input"] = {{"path", in}, {"digest_fnv1a64", file_digest(in)},
                         {"bits", input.size()}};
    manifest["seed"] = {{"path", seed_path}, {"digest_fnv1a64", file_digest(seed_path)},
                        {"bits", seed.size()}};
    manifest["output"] = {{"path", out_path}, {"digest_fnv1a64", file_digest(out_path)},
                          {"bits", output.size()}};
    manifest["blocks"] = {{"block_bits", block_bits},
                          {"processed", blocks_done},
                          {"dropped_tail_bits", dropped}};
    manifest["eps"] = {
        {"per_block_log2", per_block_eps},
        {"total_log2", per_block_eps + std::log2(static_cast<double>(
                                           std::max<std::uint64_t>(1, blocks_done)))}};
    manifest["warnings"] = warnings;
    std::ofstream mf(out_path + ".manifest.json", std::ios::trunc);
    if (!mf) throw IoError("cannot write manifest for " + out_path);
    mf << manifest.dump(2) << "\n";
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_test(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string in = r.required_str(opt.in_path, "in");
    const BitFileFormat format = parse_format(r.str(opt.format, "format", "native"));
    const double alpha = r.num(opt.alpha, "alpha", 0.01);
    const std::uint64_t sequences =
        std::max<std::uint64_t>(1, r.u64(opt.sequences, "sequences", 1));
    const std::uint64_t block_len = r.u64(opt.block_len, "block_len", 1024);
    const std::string expect = r.str(opt.expect, "expect", "");
    if (!expect.empty() && expect != "pass" && expect != "fail")
        throw ContractError("--expect takes 'pass' or 'fail'");

    const BitVector bits = read_bits(in, format);
    // byte-aligned split keeps the byte-level tests applicable per sequence
    const std::uint64_t seq_bits = (bits.size() / sequences) & ~std::uint64_t{7};
    if (seq_bits < 100)
        throw SizingError("sequences of " + std::to_string(seq_bits) + " bits are too short");

    // battery per sequence; per test family, the NIST-style proportion rule
    std::vector<std::string> names;
    std::vector<std::vector<double>> pvalues;
    std::vector<std::uint64_t> pos(seq_bits);
    for (std::uint64_t s = 0; s < sequences; ++s) {
        for (std::uint64_t j = 0; j < seq_bits; ++j) pos[j] = s * seq_bits + j;
        const auto reports = run_battery(gather(bits, pos), alpha, block_len);
        if (s == 0) {
            for (const auto& rep : reports) names.push_back(rep.name);
            pvalues.assign(reports.size(), {});
        }
        if (reports.size() != names.size())
            throw ContractError("battery shape changed between sequences");
        for (std::size_t t = 0; t < reports.size(); ++t)
            pvalues[t].push_back(reports[t].p_value);
    }

    const double phat = 1.0 - alpha;
    const double threshold =
        (sequences < 2) ? phat
                        : phat - 3.0 * std::sqrt(phat * alpha / static_cast<double>(sequences));
    bool all_pass = true;
    json tests = json::array();
    for (std::size_t t = 0; t < names.size(); ++t) {
        std::size_t passing = 0;
        for (double p : pvalues[t]) passing += (p >= alpha);
        const double proportion =
            static_cast<double>(passing) / static_cast<double>(pvalues[t].size());
        const bool prop_ok = proportion >= threshold;
        json entry = {{"name", names[t]},
                      {"p_values", pvalues[t]},
                      {"proportion", proportion},
                      {"proportion_threshold", threshold},
                      {"pass", prop_ok}};
        if (sequences >= 2) entry["ks_p"] = ks_aggregate(pvalues[t], alpha).p_value;
        all_pass = all_pass && prop_ok;
        tests.push_back(entry);
    }
    json out = {{"command", "test"},      {"in", in},
                {"alpha", alpha},         {"sequences", sequences},
                {"bits_per_sequence", seq_bits},
                {"tests", tests},         {"pass", all_pass}};
    std::cout << out.dump(2) << "\n";
    if (expect == "pass" && !all_pass)
        throw ExpectationError("expected the battery to pass, but it failed");
    if (expect == "fail" && all_pass)
        throw ExpectationError("expected the battery to fail, but it passed");
    return 0;
}

int cmd_autocorr(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string in = r.required_str(opt.in_path, "in");
    const std::string mode = r.str(opt.mode, "mode", "bits");
    const unsigned max_lag = static_cast<unsigned>(r.u64(opt.max_lag, "max_lag", 100));

    std::vector<double> series;
    if (mode == "bits") {
        const BitFileFormat format = parse_format(r.str(opt.format, "format", "native"));
        series = bits_as_series(read_bits(in, format));
    } else if (mode == "samples") {
        const BitVector raw = read_bits(in, BitFileFormat::raw);
        series = bytes_as_series(raw.bytes());
    } else {
        throw ContractError("--mode takes 'bits' or 'samples'");
    }
    const AutocorrReport rep = autocorrelation(series, max_lag);
    json out = {{"command", "autocorr"},
                {"in", in},
                {"mode", mode},
                {"n", series.size()},
                {"lags", rep.lags},
                {"coefficients", rep.coefficients},
                {"mean_coefficient", rep.mean_coefficient},
                {"theoretical_std", rep.theoretical_std}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_export(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string in = r.required_str(opt.in_path, "in");
    const std::string out = r.required_str(opt.out_path, "out");
    const BitVector bits = read_bits(in);
    export_raw(bits, out);
    std::cout << json{{"command", "export"}, {"in", in}, {"out", out}, {"bytes", bits.size() / 8}}
                     .dump(2)
              << "\n";
    return 0;
}

// Seed provisioning. True seed randomness is the operator's responsibility:
// point --in at an entropy device (e.g. /dev/urandom) for real use; without
// --in a deterministic PRNG fills the seed, which is only fit for demos.
int cmd_seed(const Options& opt, std::uint64_t bits) {
    const Resolved r = resolve(opt);
    const std::string out = r.required_str(opt.out_path, "out");
    BitVector seed;
    json source;
    if (!opt.in_path.empty() || r.cfg.has("in")) {
        const std::string in = r.required_str(opt.in_path, "in");
        std::ifstream f(in, std::ios::binary);
        if (!f) throw IoError("cannot open seed source: " + in);
        std::vector<std::uint8_t> bytes((bits + 7) / 8);
        f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (f.gcount() != static_cast<std::streamsize>(bytes.size()))
            throw IoError("seed source ran out of bytes: " + in);
        seed = BitVector::from_bytes(bytes, bits);
        source = {{"kind", "file"}, {"path", in}};
    } else {
        seed = pseudo_bits(r.cfg.get_u64_or("prng_seed", 0) ^ 0x5eedULL, bits);
        source = {{"kind", "prng-demo-only"}, {"algorithm", kSimPrngAlgorithm}};
    }
    write_bits(seed, out);
    std::cout << json{{"command", "seed"}, {"out", out}, {"bits", bits}, {"source", source}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_bench(const Options& opt) {
    const Resolved r = resolve(opt);
    const std::string extractor =
        opt.use_toeplitz
            ? "toeplitz"
            : (opt.use_trevisan ? "trevisan" : r.cfg.get_string_or("extractor", "toeplitz"));
    using clock = std::chrono::steady_clock;
    json out = {{"command", "bench"}, {"extractor", extractor}};

    if (extractor == "toeplitz") {
        const std::uint64_t n = r.u64(opt.n, "n", 4096);
        const double k = r.num(opt.k, "k", 3430.0);
        const double eps = r.num(opt.eps_log2, "eps_log2", -100.0);
        const ToeplitzParams p = make_toeplitz_params(n, k, eps);
        const std::uint64_t reps = r.u64(opt.blocks, "blocks", 200);
        const BitVector seed = pseudo_bits(1, p.seed_bits());
        std::vector<BitVector> inputs;
        for (std::uint64_t b = 0; b < reps; ++b) inputs.push_back(pseudo_bits(100 + b, p.n));
        const auto start = clock::now();
        std::size_t sink = 0;
        for (const auto& input : inputs) sink += toeplitz_extract(seed, input, p.m).bytes()[0];
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        out["params"] = params_json(p);
        out["blocks"] = reps;
        out["seconds"] = secs;
        out["sink"] = sink;  // keeps the loop observable
        out["input_bits_per_s"] = static_cast<double>(reps * p.n) / secs;
        out["output_bits_per_s"] = static_cast<double>(reps * p.m) / secs;
        std::cout << out.dump(2) << "\n";
        std::cerr << "toeplitz n=" << p.n << " m=" << p.m << ": "
                  << static_cast<double>(reps * p.m) / secs / 1000.0 << " kbit/s output\n";
        return 0;
    }
    if (extractor != "trevisan") throw ContractError("unknown extractor '" + extractor + "'");

    // sweep output lengths up to --nf at fixed --ni, profiling the design
    // enumeration and the one-bit-extractor evaluation separately
    const std::uint64_t ni = r.u64(opt.ni, "ni", 1ull << 15);
    const std::uint64_t nf_top = r.u64(opt.nf, "nf", 1ull << 14);
    const unsigned threads =
        static_cast<unsigned>(std::max<std::uint64_t>(1, r.u64(opt.threads, "threads", 1)));
    json rows = json::array();
    std::cerr << "log2_nf  design_gfops  design_s  ecc_gfmul  ecc_ops/bit  ecc_s  out_bit/s\n";
    for (std::uint64_t nf = 1024; nf <= nf_top; nf *= 2) {
        const TrevisanParams p = solve_trevisan_params(
            ni, nf, r.num_opt(opt.eps_log2, "eps_log2"), r.num_opt(opt.k, "k"));
        const WeakDesign design = WeakDesign::build(p);
        const BitVector message = pseudo_bits(3, p.n_i);
        const BitVector seed = pseudo_bits(4, p.d);

        gf_op_reset();
        gf_op_counting(true);
        auto t0 = clock::now();
        std::vector<std::uint64_t> idx;
        std::uint64_t sink = 0;
        for (std::uint64_t i = 0; i < p.n_f; ++i) {
            design.indices_of(i, idx);
            sink += idx.back();
        }
        const double design_secs = std::chrono::duration<double>(clock::now() - t0).count();
        const std::uint64_t design_ops = gf_op_counts(p.m_d).mul;

        gf_op_reset();
        t0 = clock::now();
        const BitVector result = trevisan_extract(message, seed, p, design, threads);
        const double ecc_secs = std::chrono::duration<double>(clock::now() - t0).count();
        gf_op_counting(false);
        const GfOpCounts ecc = gf_op_counts(p.m_e);

        const double ops_per_bit = static_cast<double>(ecc.mul) / static_cast<double>(p.n_f);
        const double rate = static_cast<double>(p.n_f) / ecc_secs;
        rows.push_back({{"log2_nf", std::countr_zero(nf)},
                        {"design_gf_ops", design_ops},
                        {"design_seconds", design_secs},
                        {"ecc_gf_mul", ecc.mul},
                        {"ecc_gf_add", ecc.add},
                        {"ecc_ops_per_output_bit", ops_per_bit},
                        {"ecc_seconds", ecc_secs},
                        {"output_bits_per_s", rate},
                        {"sink", sink + result.bytes()[0]}});
        char line[160];
        std::snprintf(line, sizeof(line), "%7d  %12llu  %8.3f  %9llu  %11.2f  %5.2f  %9.0f\n",
                      static_cast<int>(std::countr_zero(nf)),
                      static_cast<unsigned long long>(design_ops), design_secs,
                      static_cast<unsigned long long>(ecc.mul), ops_per_bit, ecc_secs, rate);
        std::cerr << line;
    }
    out["ni"] = ni;
    out["rows"] = rows;
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum randomness extraction toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key=value config file");
        sub->add_option("--in", opt.in_path, "input file");
        sub->add_option("--out", opt.out_path, "output file");
        sub->add_option("--seed-file", opt.seed_path, "seed bit file (native format)");
        sub->add_option("--k", opt.k, "input min-entropy in bits");
        sub->add_option("--eps-log2", opt.eps_log2, "log2 of the security parameter");
        sub->add_option("--n", opt.n, "Toeplitz input block length in bits");
        sub->add_option("--ni", opt.ni, "Trevisan input block length in bits");
        sub->add_option("--nf", opt.nf, "Trevisan output length in bits");
        sub->add_option("--alpha", opt.alpha, "significance level");
        sub->add_option("--threads", opt.threads, "worker threads (never changes output bytes)");
        sub->add_option("--blocks", opt.blocks, "cap on processed blocks / bench repetitions");
        sub->add_option("--format", opt.format, "bit file format: native|raw");
        sub->add_flag("--toeplitz", opt.use_toeplitz, "use the Toeplitz-hashing extractor");
        sub->add_flag("--trevisan", opt.use_trevisan, "use Trevisan's extractor");
        return sub;
    };

    auto* sim = add_common(app.add_subcommand("simulate", "generate synthetic ADC samples"));
    auto* ent = add_common(app.add_subcommand("entropy", "evaluate source min-entropy"));
    auto* par = add_common(app.add_subcommand("params", "solve extractor parameters"));
    auto* ext = add_common(app.add_subcommand("extract", "run an extractor over blocks"));
    auto* tst = add_common(app.add_subcommand("test", "run the statistical battery"));
    tst->add_option("--sequences", opt.sequences, "split input into this many sequences");
    tst->add_option("--block-len", opt.block_len, "block length for block frequency");
    tst->add_option("--expect", opt.expect, "exit 4 unless the verdict matches pass|fail");
    auto* aco = add_common(app.add_subcommand("autocorr", "autocorrelation report"));
    aco->add_option("--max-lag", opt.max_lag, "largest lag to evaluate");
    aco->add_option("--mode", opt.mode, "series mode: bits|samples");
    auto* exp = add_common(app.add_subcommand("export", "native bit file -> raw byte stream"));
    auto* ben = add_common(app.add_subcommand("bench", "throughput and GF-op profile"));
    std::uint64_t seed_bits = 0;
    auto* sed = add_common(app.add_subcommand("seed", "write a seed bit file"));
    sed->add_option("--bits", seed_bits, "seed length in bits")->required();

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(opt);
        if (ent->parsed()) return cmd_entropy(opt);
        if (par->parsed()) return cmd_params(opt);
        if (ext->parsed()) return cmd_extract(opt);
        if (tst->parsed()) return cmd_test(opt);
        if (aco->parsed()) return cmd_autocorr(opt);
        if (exp->parsed()) return cmd_export(opt);
        if (ben->parsed()) return cmd_bench(opt);
        if (sed->parsed()) return cmd_seed(opt, seed_bits);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const SizingError& e) {
        std::cerr << "error[SIZING]: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error[CONTRACT]: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error[FORMAT]: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error[IO]: " << e.what() << "\n";
        return 3;
    } catch (const ExpectationError& e) {
        std::cerr << "error[NEGCTRL]: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error[INTERNAL]: " << e.what() << "\n";
        return 1;
    }
}
