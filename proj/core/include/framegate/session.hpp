#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "framegate/error.hpp"
#include "framegate/protocol.hpp"
#include "framegate/transport.hpp"

namespace framegate {

enum class Family { AgreeAbstract, AgreeTyped, GameAbstract, GameTyped };

std::string_view to_string(Family f) noexcept;
std::optional<Family> family_from_string(std::string_view name) noexcept;
ScenarioKind kind_of(Family f) noexcept;

/// Everything both processes need to agree on before a session starts.
struct Scenario {
    Family family = Family::AgreeAbstract;
    std::uint64_t seed = 1;
    Mode mode = Mode::exact();
    /// Inject per-round drift on Bob's side.
    bool drift = false;
    /// Bob answers his n-th reply with Abort (0 disables).
    int abort_after = 0;
    /// Game families only.
    Placement placement = Placement::Pre;
    bool apply_correction = true;
};

/// Encodings and request derived deterministically from the seed: Alice's
/// encoding, a planted relation and Bob = planted ∘ Alice.
struct ScenarioSetup {
    Encoding alice;
    Encoding bob;
    GLParityElement planted;
    State wanted;
    std::optional<ComplexMatrix> drift;
};

ScenarioSetup derive_setup(const Scenario& s);

/// Session id carried in every message of a seeded scenario.
std::uint64_t session_id_for(const Scenario& s) noexcept;

BobAgent make_bob(const Scenario& s, const ScenarioSetup& setup);

struct SessionOutcome {
    Transcript transcript;
    std::optional<ErrorCode> error;
    std::string error_message;

    [[nodiscard]] bool ok() const noexcept { return !error && transcript.outcome.success; }
};

/// Runs Alice's side over `link`, recording every message; errors end up in
/// the outcome together with the partial transcript.
SessionOutcome run_alice(Link& link, const Scenario& s);

/// Both agents in this process.
SessionOutcome run_in_process(const Scenario& s);

/// Bob's side over a connected transport.
void run_bob(FdTransport& transport, const Scenario& s);

}  // namespace framegate
