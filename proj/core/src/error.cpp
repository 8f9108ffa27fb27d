#include "framegate/error.hpp"

namespace framegate {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPhysical: return "NotPhysical";
    case ErrorCode::MetricIncompatible: return "MetricIncompatible";
    case ErrorCode::Incomplete: return "Incomplete";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::NoConsistentRelation: return "NoConsistentRelation";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotProperOrthochronous: return "NotProperOrthochronous";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::InvalidSpin: return "InvalidSpin";
    case ErrorCode::NotUnit: return "NotUnit";
    case ErrorCode::IncompletePath: return "IncompletePath";
    case ErrorCode::IncompatibleChoice: return "IncompatibleChoice";
    case ErrorCode::NotInStabilizer: return "NotInStabilizer";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::EigenvalueMismatch: return "EigenvalueMismatch";
    case ErrorCode::InvalidMomentum: return "InvalidMomentum";
    case ErrorCode::ConsistencyFailure: return "ConsistencyFailure";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::PeerAbort: return "PeerAbort";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::GraphParseError: return "GraphParseError";
    }
    return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept
{
    for (int c = 0; c <= static_cast<int>(ErrorCode::GraphParseError); ++c) {
        if (to_string(static_cast<ErrorCode>(c)) == name) {
            return static_cast<ErrorCode>(c);
        }
    }
    return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail)
{
}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace framegate
