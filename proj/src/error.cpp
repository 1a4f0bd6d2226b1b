#include "fillrad/error.hpp"

namespace fillrad {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MetricAsymmetric: return "MetricAsymmetric";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::NotNonexpansive: return "NotNonexpansive";
    case ErrorCode::NotAProduct: return "NotAProduct";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::NotWellDefined: return "NotWellDefined";
    case ErrorCode::BadAnchor: return "BadAnchor";
    case ErrorCode::NotACycle: return "NotACycle";
    case ErrorCode::MultiplicityTooHigh: return "MultiplicityTooHigh";
    case ErrorCode::IncompleteReport: return "IncompleteReport";
    case ErrorCode::IncompleteBoundary: return "IncompleteBoundary";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::SpectralFailure: return "SpectralFailure";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::SpectralGapLost: return "SpectralGapLost";
    case ErrorCode::IndeterminateIndex: return "IndeterminateIndex";
    case ErrorCode::FluxAliased: return "FluxAliased";
    case ErrorCode::FitUnreliable: return "FitUnreliable";
    case ErrorCode::BadControlFunction: return "BadControlFunction";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
{
}

}  // namespace fillrad
