#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qitp {

enum class ErrorKind {
    NonHermitianInput,
    NoConvergence,
    NonFiniteFunctionValue,
    UnitarityCheckFailed,
    ZeroVector,
    DimensionMismatch,
    PostselectionImpossible,
    NonRealExpectation,
    InvalidDistribution,
    InvalidFactorization,
    SingularOverlap,
    ParseError,
    DimensionError,
    NotUnitary,
    FidelityShortfall,
    InvalidArgument,
};

inline const char *to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonHermitianInput: return "NonHermitianInput";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NonFiniteFunctionValue: return "NonFiniteFunctionValue";
        case ErrorKind::UnitarityCheckFailed: return "UnitarityCheckFailed";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::PostselectionImpossible: return "PostselectionImpossible";
        case ErrorKind::NonRealExpectation: return "NonRealExpectation";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::InvalidFactorization: return "InvalidFactorization";
        case ErrorKind::SingularOverlap: return "SingularOverlap";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DimensionError: return "DimensionError";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::FidelityShortfall: return "FidelityShortfall";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Base exception for every failure raised by the library. `kind()` lets
/// callers branch without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Raised when the ancilla-0 branch carries (numerically) no weight. This is
/// what happens when the trial energy sits well below the ground energy.
class PostselectionImpossible : public Error {
  public:
    PostselectionImpossible(double p0, std::size_t repetition)
        : Error(ErrorKind::PostselectionImpossible,
                "ancilla-0 probability " + std::to_string(p0) + " at repetition " +
                    std::to_string(repetition)),
          p0_(p0),
          repetition_(repetition) {}

    double p0() const noexcept { return p0_; }
    /// Zero-based repetition at which post-selection failed.
    std::size_t repetition() const noexcept { return repetition_; }

  private:
    double p0_;
    std::size_t repetition_;
};

}  // namespace qitp
