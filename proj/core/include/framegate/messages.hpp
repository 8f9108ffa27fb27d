#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "framegate/groups.hpp"
#include "framegate/quantum.hpp"

namespace framegate {

inline constexpr std::uint32_t protocol_version = 1;

struct Mode {
    enum class Kind { Exact, Sampled };
    Kind kind = Kind::Exact;
    std::uint64_t copies = 0;
    std::uint64_t seed = 0;

    static Mode exact() { return {}; }
    static Mode sampled(std::uint64_t copies, std::uint64_t seed) { return {Kind::Sampled, copies, seed}; }
    [[nodiscard]] bool is_sampled() const noexcept { return kind == Kind::Sampled; }

    friend bool operator==(const Mode&, const Mode&) = default;
};

/// Concrete system relative to the hidden reference: type R, basis U and
/// parity, with X = R·U (parity +1) or Rᵀ·U (parity −1).
class SystemDescriptor {
  public:
    static SystemDescriptor make(ComplexMatrix r, ComplexMatrix u, int parity);
    /// Polar split of an encoding matrix.
    static SystemDescriptor from_encoding(const Encoding& phi);

    [[nodiscard]] int dim() const noexcept { return r_.dim(); }
    [[nodiscard]] const ComplexMatrix& R() const noexcept { return r_; }
    [[nodiscard]] const ComplexMatrix& U() const noexcept { return u_; }
    [[nodiscard]] int parity() const noexcept { return parity_; }
    [[nodiscard]] ComplexMatrix X() const;

  private:
    SystemDescriptor(ComplexMatrix r, ComplexMatrix u, int parity) : r_(std::move(r)), u_(std::move(u)), parity_(parity)
    {
    }

    ComplexMatrix r_;
    ComplexMatrix u_;
    int parity_ = +1;
};

struct HelloMsg {
    std::uint32_t version = protocol_version;
    std::string role;
    std::string scenario;
};

struct DescribedObservable {
    std::string label;
    ComplexMatrix matrix;
};

struct RequestMsg {
    std::string system_class_id;
    std::vector<DescribedObservable> observables;
    /// Per observable, descending, repeated by multiplicity.
    std::vector<std::vector<double>> eigenvalues;
    /// Per observable, one entry per distinct eigenvalue (gap 1e-9).
    std::vector<std::vector<double>> probabilities;
    Mode mode;
};

struct AnswerMsg {
    State state;  ///< physical object, in reference coordinates
    SystemDescriptor descriptor;
};

enum class Placement { Pre, Post };

struct CorrectionMsg {
    Placement placement = Placement::Pre;
    std::optional<GLParityElement> transform;
};

struct VerifyMsg {
    bool success = false;
    double fidelity = 0.0;
    double residual = 0.0;
    std::optional<GLParityElement> recovered;
};

struct AbortMsg {
    std::string code;
    std::string reason;
};

using MessageBody = std::variant<HelloMsg, RequestMsg, AnswerMsg, CorrectionMsg, VerifyMsg, AbortMsg>;

enum class MessageKind { Hello, Request, Answer, Correction, Verify, Abort };

std::string_view to_string(MessageKind k) noexcept;

struct WireMessage {
    std::uint64_t session_id = 0;
    MessageBody body;

    [[nodiscard]] MessageKind kind() const noexcept { return static_cast<MessageKind>(body.index()); }
};

/// RequestMsg invariants: matching list lengths, descending eigenvalues,
/// one probability per distinct eigenvalue, probabilities in [0, 1] summing
/// to 1 within 1e-10. InvalidArgument otherwise.
void validate(const RequestMsg& r);

/// Pairs a descending eigenvalue list (with multiplicity) with per-cluster
/// probabilities. InvalidArgument when the counts disagree.
std::vector<Outcome> outcome_list(const std::vector<double>& eigenvalues, const std::vector<double>& probabilities);

/// Distinct values of a descending list, merged with the library's cluster gap.
std::vector<double> distinct_eigenvalues(const std::vector<double>& eigenvalues);

}  // namespace framegate
