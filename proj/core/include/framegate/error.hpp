#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace framegate {

enum class ErrorCode {
    // linalg
    NotHermitian,
    NoConvergence,
    Singular,
    NotPositiveDefinite,
    DimensionMismatch,
    InvalidArgument,
    // quantum
    NotPhysical,
    MetricIncompatible,
    Incomplete,
    Inconsistent,
    Underdetermined,
    NoConsistentRelation,
    // groups
    NotUnimodular,
    NotProperOrthochronous,
    NotRotation,
    InvalidSpin,
    // umgraph
    NotUnit,
    IncompletePath,
    IncompatibleChoice,
    NotInStabilizer,
    Unreachable,
    InvalidGraph,
    // protocol
    ScenarioMismatch,
    EigenvalueMismatch,
    // relsg
    InvalidMomentum,
    ConsistencyFailure,
    // wire
    Malformed,
    VersionMismatch,
    Timeout,
    PeerAbort,
    TransportError,
    // cli
    ConfigError,
    GraphParseError,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

/// Every failure in the library surfaces as this exception; `code()` is the
/// stable, testable part and `what()` carries the human detail.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& detail);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

  private:
    ErrorCode code_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

}  // namespace framegate
