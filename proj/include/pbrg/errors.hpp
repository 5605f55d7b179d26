#pragma once

#include <stdexcept>
#include <string>

namespace pbrg {

enum class ErrorCode {
    NonFiniteMultiplier,
    DomainTooSmall,
    GridMismatch,
    DegenerateProbe,
    GeneratorUnstable,
    SmallDivisor,
    NeumannDivergence,
    SeriesStalled,
    NewtonDiverged,
    SmallnessViolated,
    TamenessViolated,
    NanDetected,
    SpectrumOverflow,
    UnknownKey,
    TypeError,
    MissingRequired,
    DuplicateKey,
    InvalidValue,
    BadMagic,
    VersionMismatch,
    TruncatedPayload,
    IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pbrg
