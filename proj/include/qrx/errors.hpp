#pragma once

#include <stdexcept>
#include <string>

namespace qrx {

// Caller violated a documented precondition (bad lengths, mismatched specs,
// out-of-range arguments). Maps to CLI exit code 2.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter solving failed (insufficient min-entropy, no consistent field
// degree, ...). Maps to CLI exit code 2.
struct SizingError : ContractError {
    explicit SizingError(const std::string& msg) : ContractError(msg) {}
};

// Underlying file operation failed. Maps to CLI exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// File contents do not match the expected on-disk format. Maps to CLI exit
// code 3.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qrx
