#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "framegate/error.hpp"
#include "framegate/groups.hpp"
#include "framegate/messages.hpp"
#include "framegate/quantum.hpp"

namespace framegate {

enum class ScenarioKind { Abstract, Typed };

struct VerifyResult {
    bool success = false;
    double fidelity = 0.0;
    std::optional<GLParityElement> recovered_T;
    double residual = 0.0;
};

enum class Direction { AliceToBob, BobToAlice };

struct TranscriptEntry {
    Direction direction = Direction::AliceToBob;
    std::string bytes;  ///< canonical wire payload
};

struct Transcript {
    std::uint64_t seed = 0;
    std::vector<TranscriptEntry> entries;
    VerifyResult outcome;

    /// One line per message, then an outcome line.
    [[nodiscard]] std::string to_text() const;
};

/// Alice's view of the channel to Bob. `exchange` sends and waits for the
/// reply; `post` sends a final message that gets none.
class Link {
  public:
    virtual ~Link() = default;
    virtual WireMessage exchange(const WireMessage& msg) = 0;
    virtual void post(const WireMessage& msg) = 0;
};

struct BobOptions {
    ScenarioKind scenario = ScenarioKind::Abstract;
    /// Unitary applied once more per prepared object (inertial-frame violation).
    std::optional<ComplexMatrix> drift;
    /// Replies with Abort instead of the n-th reply (1-based); 0 disables.
    int abort_at_reply = 0;
};

/// Bob's side of every scenario: reacts to each message with at most one reply.
class BobAgent {
  public:
    BobAgent(Encoding encoding, BobOptions options);

    /// nullopt when the message needs no reply. Protocol violations come
    /// back as Abort replies rather than exceptions.
    std::optional<WireMessage> handle(const WireMessage& msg);
    [[nodiscard]] bool finished() const noexcept { return finished_; }

  private:
    enum class Expect { Hello, Any };

    WireMessage reply(MessageBody body);
    WireMessage abort(ErrorCode code, const std::string& reason);
    AnswerMsg answer(const RequestMsg& r);

    Encoding encoding_;
    BobOptions options_;
    Expect expect_ = Expect::Hello;
    std::uint64_t session_id_ = 0;
    std::optional<GLParityElement> correction_;
    int replies_ = 0;
    int prepared_ = 0;
    bool finished_ = false;
};

/// Forwards straight into a BobAgent in the same process.
class LocalLink final : public Link {
  public:
    explicit LocalLink(BobAgent& bob) : bob_(bob) {}
    WireMessage exchange(const WireMessage& msg) override;
    void post(const WireMessage& msg) override;

  private:
    BobAgent& bob_;
};

/// Records the canonical bytes of every message passing through `inner`.
class RecordingLink final : public Link {
  public:
    explicit RecordingLink(Link& inner) : inner_(inner) {}
    WireMessage exchange(const WireMessage& msg) override;
    void post(const WireMessage& msg) override;
    [[nodiscard]] const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }

  private:
    Link& inner_;
    std::vector<TranscriptEntry> entries_;
};

/// Tomographically complete device descriptions: the non-identity
/// orthonormal Hermitian basis scaled by √2 (Pauli matrices for qubits),
/// with the identity prepended for typed systems.
std::vector<DescribedObservable> standard_devices(int dim, ScenarioKind kind);

/// Outcome spectrum and distribution of device `n` on a (possibly typed) state.
TypedMeasurement device_readout(const State& state, const ComplexMatrix& n);

/// The request Alice sends for an object she describes as `wanted`.
RequestMsg make_request(const State& wanted, ScenarioKind kind, const Mode& mode);

/// φ_B ∘ φ_A⁻¹ as a GL-parity element.
GLParityElement relative_transform(const Encoding& alice, const Encoding& bob);

bool implementable(const GLParityElement& t);
bool implementable(const PUAElement& t);

struct GameOptions {
    Placement placement = Placement::Pre;
    double fidelity_threshold = 1.0 - 1e-8;
    double significance = 1e-3;
    double type_tolerance = 1e-8;
    std::uint64_t session_id = 1;
    /// Inferred from the inputs when absent (Abstract iff everything is unitary).
    std::optional<ScenarioKind> kind;
};

struct GameResult {
    VerifyResult result;
    Transcript transcript;
};

/// One request/answer round with the hidden reference standing in for
/// physics. `wanted` is the state Alice asks for, in her own description.
/// ScenarioMismatch when the encodings or T do not fit the scenario kind.
GameResult run_game(const Encoding& alice, const Encoding& bob, const std::optional<GLParityElement>& t,
                    const State& wanted, const Mode& mode = Mode::exact(), const GameOptions& options = {});

/// Alice's half of run_game, usable over any link.
VerifyResult alice_game(Link& link, const Encoding& alice, ScenarioKind kind, const std::optional<GLParityElement>& t,
                        const State& wanted, const Mode& mode, const GameOptions& options);

struct AgreementOptions {
    std::uint64_t session_id = 1;
    /// Relation fit acceptance; sampled mode widens it to 30/√n unless set.
    std::optional<double> max_residual;
};

struct AbstractAgreement {
    PUAElement recovered;  ///< T with T ∘ φ_A = φ_B
    double residual = 0.0;
    Transcript transcript;
};

/// Three-eigenstate qubit protocol. NoConsistentRelation if no unitary or
/// antiunitary relation fits the received states.
AbstractAgreement agree_abstract_qubit(const Encoding& alice, const Encoding& bob, const Mode& mode,
                                       const BobOptions& bob_options = {}, const AgreementOptions& options = {});
AbstractAgreement alice_agree_abstract(Link& link, const Encoding& alice, const Mode& mode,
                                       const AgreementOptions& options);

struct TypedAgreement {
    GLParityElement recovered;
    double lambda = 1.0;
    RealMatrix lorentz = RealMatrix::identity(4);  ///< includes the y-reflection for kind −1
    double residual = 0.0;
    Transcript transcript;
};

/// Typed variant: also reads the types of the received objects and fits a
/// scaled Lorentz map. EigenvalueMismatch when no GL-parity element fits.
TypedAgreement agree_typed_qubit(const Encoding& alice, const Encoding& bob, const Mode& mode,
                                 const BobOptions& bob_options = {}, const AgreementOptions& options = {});
TypedAgreement alice_agree_typed(Link& link, const Encoding& alice, const Mode& mode, const AgreementOptions& options);

struct GLParityFit {
    GLParityElement element;  ///< K with act(K, in) = out
    double residual = 0.0;
};

/// Fits a qubit GL-parity element to Hermitian (input, output) pairs through
/// the four-vector map and its Choi matrix. Underdetermined when the inputs
/// do not span; NoConsistentRelation when no linear map fits within
/// `max_residual`; EigenvalueMismatch when the linear map is not a
/// conjugation.
GLParityFit fit_glparity(const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& pairs, double max_residual);

/// Scenario label carried in Hello: "<family>-abstract" or "<family>-typed".
std::string scenario_label(const std::string& family, ScenarioKind kind);

/// χ² p-value of observed counts against expected probabilities.
double chi_squared_p_value(const std::vector<std::vector<double>>& expected,
                           const std::vector<std::vector<std::uint64_t>>& observed);

}  // namespace framegate
