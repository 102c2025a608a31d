#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spar {

enum class ErrorCode {
    ZeroVarianceResponse,
    SingularSystem,
    SingularGram,
    DimensionMismatch,
    InvalidArgument,
    AllZeroValues,
    InconsistentTau,
    DegenerateReducedFit,
    FoldTooSmall,
    NonPositiveDefinite,
    DegenerateDenominator,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ZeroVarianceResponse: return "ZeroVarianceResponse";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllZeroValues: return "AllZeroValues";
    case ErrorCode::InconsistentTau: return "InconsistentTau";
    case ErrorCode::DegenerateReducedFit: return "DegenerateReducedFit";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace spar
