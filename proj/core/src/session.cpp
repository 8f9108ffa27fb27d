#include "framegate/session.hpp"

#include <array>
#include <cmath>

#include "framegate/random.hpp"

namespace framegate {
namespace {

constexpr std::array<std::pair<Family, std::string_view>, 4> family_names{{
    {Family::AgreeAbstract, "agree-abstract"},
    {Family::AgreeTyped, "agree-typed"},
    {Family::GameAbstract, "game-abstract"},
    {Family::GameTyped, "game-typed"},
}};

std::array<double, 3> random_axis(Rng& rng)
{
    std::array<double, 3> n{rng.normal(), rng.normal(), rng.normal()};
    const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    for (double& x : n) {
        x /= norm;
    }
    return n;
}

}  // namespace

std::string_view to_string(Family f) noexcept
{
    for (const auto& [family, name] : family_names) {
        if (family == f) {
            return name;
        }
    }
    return "?";
}

std::optional<Family> family_from_string(std::string_view name) noexcept
{
    for (const auto& [family, n] : family_names) {
        if (n == name) {
            return family;
        }
    }
    return std::nullopt;
}

ScenarioKind kind_of(Family f) noexcept
{
    return f == Family::AgreeAbstract || f == Family::GameAbstract ? ScenarioKind::Abstract : ScenarioKind::Typed;
}

std::uint64_t session_id_for(const Scenario& s) noexcept { return derive_seed(s.seed, 0) >> 1; }

ScenarioSetup derive_setup(const Scenario& s)
{
    Rng rng(derive_seed(s.seed, 1));
    const bool typed = kind_of(s.family) == ScenarioKind::Typed;
    const int parity = rng.index(2) == 0 ? 1 : -1;
    if (!typed) {
        const Encoding alice = Encoding::make(haar_unitary(2, rng), 1);
        const GLParityElement planted = as_glparity(PUAElement::make(haar_unitary(2, rng), parity));
        const Encoding bob = as_encoding(glparity_compose(planted, as_glparity(alice)));
        State wanted = State::make(random_density(2, rng));
        std::optional<ComplexMatrix> drift;
        if (s.drift) {
            drift = su2_rotation(random_axis(rng), 0.4);
        }
        return {alice, bob, planted, std::move(wanted), std::move(drift)};
    }
    const Encoding alice = Encoding::make(ginibre(2, rng) * Complex(std::sqrt(0.5)), 1);
    const GLParityElement planted = GLParityElement::make(ginibre(2, rng) * Complex(std::sqrt(0.5)), parity);
    const Encoding bob = as_encoding(glparity_compose(planted, as_glparity(alice)));
    State wanted = apply_encoding(alice, State::make(random_density(2, rng)));
    std::optional<ComplexMatrix> drift;
    if (s.drift) {
        drift = su2_rotation(random_axis(rng), 0.4);
    }
    return {alice, bob, planted, std::move(wanted), std::move(drift)};
}

BobAgent make_bob(const Scenario& s, const ScenarioSetup& setup)
{
    return BobAgent(setup.bob, BobOptions{kind_of(s.family), setup.drift, s.abort_after});
}

SessionOutcome run_alice(Link& link, const Scenario& s)
{
    const ScenarioSetup setup = derive_setup(s);
    RecordingLink recorder(link);
    SessionOutcome out;
    out.transcript.seed = s.seed;
    const std::uint64_t sid = session_id_for(s);
    try {
        switch (s.family) {
        case Family::AgreeAbstract: {
            const auto r = alice_agree_abstract(recorder, setup.alice, s.mode, AgreementOptions{sid, std::nullopt});
            out.transcript.outcome = VerifyResult{true, 1.0, as_glparity(r.recovered), r.residual};
            break;
        }
        case Family::AgreeTyped: {
            const auto r = alice_agree_typed(recorder, setup.alice, s.mode, AgreementOptions{sid, std::nullopt});
            out.transcript.outcome = VerifyResult{true, 1.0, r.recovered, r.residual};
            break;
        }
        case Family::GameAbstract:
        case Family::GameTyped: {
            GameOptions options;
            options.placement = s.placement;
            options.session_id = sid;
            options.kind = kind_of(s.family);
            std::optional<GLParityElement> t;
            if (s.apply_correction) {
                t = setup.planted;
            }
            out.transcript.outcome = alice_game(recorder, setup.alice, kind_of(s.family), t, setup.wanted, s.mode, options);
            break;
        }
        }
    }
    catch (const Error& e) {
        out.error = e.code();
        out.error_message = e.what();
    }
    out.transcript.entries = recorder.entries();
    return out;
}

SessionOutcome run_in_process(const Scenario& s)
{
    const ScenarioSetup setup = derive_setup(s);
    BobAgent bob = make_bob(s, setup);
    LocalLink link(bob);
    return run_alice(link, s);
}

void run_bob(FdTransport& transport, const Scenario& s)
{
    const ScenarioSetup setup = derive_setup(s);
    BobAgent bob = make_bob(s, setup);
    serve_bob(transport, bob);
}

}  // namespace framegate
