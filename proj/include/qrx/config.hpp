#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace qrx {

/// Flat key=value pipeline configuration.
///
/// Grammar: one `key=value` per line; blank lines and lines starting with '#'
/// are ignored; whitespace around key and value is trimmed. Keys must be
/// known. Canonical form (what serialize() emits) is the keys in sorted
/// order, one per line, no comments; a canonical file re-serializes
/// byte-identically.
class PipelineConfig {
public:
    PipelineConfig() = default;

    static PipelineConfig parse(const std::string& text);
    static PipelineConfig load(const std::string& path);

    std::string serialize() const;

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
    std::optional<double> get_double_opt(const std::string& key) const;
    std::optional<std::uint64_t> get_u64_opt(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// FNV-1a 64-bit digest, hex-encoded. Provenance fingerprint for manifests;
/// not a cryptographic hash.
std::string fnv1a_hex(const void* data, std::size_t size);

}  // namespace qrx
