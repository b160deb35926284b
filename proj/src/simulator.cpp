#include "qrx/simulator.hpp"

#include <cmath>
#include <fstream>

#include "qrx/errors.hpp"

#include <json.hpp>

namespace qrx {

std::string to_string(ClassicalKind kind) {
    switch (kind) {
        case ClassicalKind::gaussian: return "gaussian";
        case ClassicalKind::sinusoidal_drift: return "sinusoidal-drift";
        case ClassicalKind::constant: return "constant";
    }
    throw ContractError("to_string: bad ClassicalKind");
}

ClassicalKind classical_kind_from_string(const std::string& s) {
    if (s == "gaussian") return ClassicalKind::gaussian;
    if (s == "sinusoidal-drift") return ClassicalKind::sinusoidal_drift;
    if (s == "constant") return ClassicalKind::constant;
    throw ContractError("unknown classical noise kind: " + s);
}

namespace detail {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform_at(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t r = splitmix64_at(seed, counter) >> 11;  // 53 bits
    return (static_cast<double>(r) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

std::vector<std::uint16_t> simulate(const SimConfig& config) {
    config.model.validate();
    const double sigma_q = std::sqrt(quantum_variance(config.model));
    const double sigma2_c = config.model.sigma2_total / (1.0 + config.model.gamma);
    const double sigma_c = std::sqrt(sigma2_c);
    const double sin_amp = std::sqrt(2.0 * sigma2_c);
    const std::uint16_t max_code =
        static_cast<std::uint16_t>((1u << config.model.adc_bits) - 1);
    const double width = (config.model.adc_max - config.model.adc_min) /
                         static_cast<double>(1u << config.model.adc_bits);

    std::vector<std::uint16_t> codes(config.n_samples);
    for (std::uint64_t t = 0; t < config.n_samples; ++t) {
        const double quantum =
            sigma_q * normal_quantile(detail::uniform_at(config.prng_seed, 2 * t));
        double classical = 0.0;
        switch (config.classical_kind) {
            case ClassicalKind::gaussian:
                classical =
                    sigma_c * normal_quantile(detail::uniform_at(config.prng_seed, 2 * t + 1));
                break;
            case ClassicalKind::sinusoidal_drift:
                classical = sin_amp * std::sin(2.0 * M_PI * config.classical_freq *
                                                   static_cast<double>(t) +
                                               config.classical_phase);
                break;
            case ClassicalKind::constant:
                classical = config.classical_value;
                break;
        }
        const double v = config.model.mean + quantum + classical;
        double code = std::floor((v - config.model.adc_min) / width);
        if (code < 0.0) code = 0.0;
        if (code > static_cast<double>(max_code)) code = static_cast<double>(max_code);
        codes[t] = static_cast<std::uint16_t>(code);
    }
    return codes;
}

namespace {
nlohmann::json config_to_json(const SimConfig& c) {
    return nlohmann::json{
        {"algorithm", kSimPrngAlgorithm},
        {"gamma", c.model.gamma},
        {"sigma2_total", c.model.sigma2_total},
        {"mean", c.model.mean},
        {"adc_bits", c.model.adc_bits},
        {"adc_min", c.model.adc_min},
        {"adc_max", c.model.adc_max},
        {"classical_kind", to_string(c.classical_kind)},
        {"classical_freq", c.classical_freq},
        {"classical_phase", c.classical_phase},
        {"classical_value", c.classical_value},
        {"prng_seed", c.prng_seed},
        {"n_samples", c.n_samples},
    };
}
}  // namespace

void write_samples(const std::vector<std::uint16_t>& samples, const SimConfig& config,
                   const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    const bool wide = config.model.adc_bits > 8;
    for (std::uint16_t s : samples) {
        if (wide) {
            const char buf[2] = {static_cast<char>(s & 0xFF), static_cast<char>(s >> 8)};
            f.write(buf, 2);
        } else {
            const char b = static_cast<char>(s & 0xFF);
            f.write(&b, 1);
        }
    }
    if (!f) throw IoError("write failed: " + path);

    std::ofstream meta(path + ".json", std::ios::trunc);
    if (!meta) throw IoError("cannot open for writing: " + path + ".json");
    meta << config_to_json(config).dump(2) << "\n";
}

std::vector<std::uint16_t> read_samples(const std::string& path, unsigned adc_bits) {
    if (adc_bits < 1 || adc_bits > 16)
        throw ContractError("read_samples: adc_bits must be in 1..16");
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed: " + path);
    std::vector<std::uint16_t> samples;
    if (adc_bits <= 8) {
        samples.assign(data.begin(), data.end());
    } else {
        if (data.size() % 2 != 0)
            throw FormatError("sample file has odd byte count for a 2-byte format: " + path);
        samples.resize(data.size() / 2);
        for (std::size_t i = 0; i < samples.size(); ++i)
            samples[i] = static_cast<std::uint16_t>(data[2 * i] |
                                                    (static_cast<unsigned>(data[2 * i + 1]) << 8));
    }
    return samples;
}

BitVector samples_to_bits(const std::vector<std::uint16_t>& samples, unsigned adc_bits) {
    if (adc_bits < 1 || adc_bits > 16)
        throw ContractError("samples_to_bits: adc_bits must be in 1..16");
    BitVector v(samples.size() * adc_bits);
    std::size_t pos = 0;
    for (std::uint16_t s : samples)
        for (unsigned j = 0; j < adc_bits; ++j)
            v.set_bit(pos++, (s >> (adc_bits - 1 - j)) & 1u);
    return v;
}

}  // namespace qrx
