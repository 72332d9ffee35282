#pragma once

#include <stdexcept>
#include <string>

namespace bslab {

/// Configuration / input-validation problems (CLI exit code 3).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failures of a numerical stage: non-convergence, near-singular solve,
/// parameter on the spectrum (CLI exit code 4).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dataset container i/o failures, one kind per distinct corruption mode.
struct DatasetIoError : std::runtime_error {
    enum class Kind { bad_magic, version_mismatch, truncated, corrupt_crc, metadata_invalid, io };
    Kind kind;
    DatasetIoError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

}  // namespace bslab
