#include "qrx/config.hpp"

#include <array>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "qrx/errors.hpp"

namespace qrx {

namespace {

constexpr std::array kKnownKeys = {
    // source model
    "gamma", "sigma2_total", "mean", "adc_bits", "adc_min", "adc_max",
    // simulator
    "classical_kind", "classical_freq", "classical_phase", "classical_value",
    "prng_seed", "n_samples",
    // extractor
    "extractor", "n", "k", "eps_log2", "ni", "nf",
    // pipeline
    "alpha", "threads", "blocks", "format", "in", "out", "seed_file",
    // tests
    "block_len", "sequences", "mode", "max_lag", "expect",
};

bool known_key(const std::string& key) {
    return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

PipelineConfig PipelineConfig::parse(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ContractError("config line " + std::to_string(lineno) +
                                ": expected key=value, got '" + t + "'");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string PipelineConfig::serialize() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

bool PipelineConfig::has(const std::string& key) const { return values_.count(key) != 0; }

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ContractError("unknown config key: '" + key + "'");
    values_[key] = value;
}

std::string PipelineConfig::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ContractError("missing required config key: " + key);
    return it->second;
}

std::string PipelineConfig::get_string_or(const std::string& key,
                                          const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double PipelineConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "': not a number: '" + v + "'");
    }
    if (used != v.size())
        throw ContractError("config key '" + key + "': trailing junk in '" + v + "'");
    return out;
}

double PipelineConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t PipelineConfig::get_u64(const std::string& key) const {
    const std::string v = get_string(key);
    std::size_t used = 0;
    unsigned long long out;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw ContractError("config key '" + key + "': not an unsigned integer: '" + v + "'");
    }
    if (used != v.size())
        throw ContractError("config key '" + key + "': trailing junk in '" + v + "'");
    return out;
}

std::uint64_t PipelineConfig::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

std::optional<double> PipelineConfig::get_double_opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

std::optional<std::uint64_t> PipelineConfig::get_u64_opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_u64(key);
}

std::string fnv1a_hex(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace qrx
