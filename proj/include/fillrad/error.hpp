#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fillrad {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    // metric-core
    MetricAsymmetric,
    TriangleViolation,
    NegativeDistance,
    UnsupportedModel,
    NotNonexpansive,
    // covers-nerves
    NotAProduct,
    CoverageGap,
    NotWellDefined,
    BadAnchor,
    // homology-fillrad
    NotACycle,
    MultiplicityTooHigh,
    IncompleteReport,
    // lipschitz-ktheory
    IncompleteBoundary,
    DomainMismatch,
    // index-pairing
    SpectralFailure,
    SupportViolation,
    SpectralGapLost,
    IndeterminateIndex,
    FluxAliased,
    FitUnreliable,
    BadControlFunction,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fillrad
