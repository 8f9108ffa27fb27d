#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "framegate/error.hpp"
#include "framegate/protocol.hpp"
#include "support.hpp"

using namespace framegate;
using framegate::testing::Gen;

namespace {

void expect_code(ErrorCode code, const std::function<void()>& f)
{
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(code);
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

Encoding typed_encoding(Gen& gen, int parity = 1) { return Encoding::make(gen.bounded_invertible(2, 0.5), parity); }

Encoding compose_onto(const GLParityElement& planted, const Encoding& alice)
{
    return as_encoding(glparity_compose(planted, as_glparity(alice)));
}

}  // namespace

// ---------------------------------------------------------------- game

TEST(Game, SameFrameNeedsNoCorrection)
{
    Gen gen(401);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    const State wanted = State::make(gen.density(2));
    const auto r = run_game(alice, alice, std::nullopt, wanted);
    EXPECT_TRUE(r.result.success);
    EXPECT_NEAR(r.result.fidelity, 1.0, 1e-9);
    EXPECT_FALSE(r.transcript.entries.empty());
}

TEST(Game, MisalignedFramesFailWithoutCorrection)
{
    const Encoding alice = Encoding::identity(2);
    const Encoding bob = Encoding::make(su2_rotation({1.0, 0.0, 0.0}, std::numbers::pi / 2), 1);
    ComplexMatrix up(2);
    up(0, 0) = 1.0;
    const auto r = run_game(alice, bob, std::nullopt, State::make(up));
    EXPECT_FALSE(r.result.success);
    EXPECT_NEAR(r.result.fidelity, 0.5, 1e-9);
}

TEST(Game, PropertyCorrectRelationWinsBothPlacements)
{
    Gen gen(402);
    for (int i = 0; i < 100; ++i) {
        const Encoding alice = Encoding::make(gen.unitary(2), 1);
        const auto planted = as_glparity(PUAElement::make(gen.unitary(2), 1));
        const Encoding bob = compose_onto(planted, alice);
        const State wanted = State::make(gen.density(2));
        for (auto placement : {Placement::Pre, Placement::Post}) {
            GameOptions o;
            o.placement = placement;
            const auto r = run_game(alice, bob, planted, wanted, Mode::exact(), o);
            EXPECT_TRUE(r.result.success) << "case " << i << " fidelity " << r.result.fidelity;
        }
        EXPECT_TRUE(relative_transform(alice, bob).kind() == 1);
    }
}

TEST(Game, AntiunitaryCorrectionPreOnly)
{
    Gen gen(403);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    const auto planted = as_glparity(PUAElement::make(gen.unitary(2), -1));
    const Encoding bob = compose_onto(planted, alice);
    const State wanted = State::make(gen.density(2));
    EXPECT_TRUE(run_game(alice, bob, planted, wanted).result.success);
    GameOptions post;
    post.placement = Placement::Post;
    expect_code(ErrorCode::ScenarioMismatch, [&] { (void)run_game(alice, bob, planted, wanted, Mode::exact(), post); });
}

TEST(Game, TypedRelationWins)
{
    Gen gen(404);
    for (int i = 0; i < 50; ++i) {
        const Encoding alice = typed_encoding(gen);
        const auto planted = GLParityElement::make(gen.bounded_invertible(2, 0.5), gen.parity());
        const Encoding bob = compose_onto(planted, alice);
        const State wanted = apply_encoding(alice, State::make(gen.density(2)));
        const auto r = run_game(alice, bob, planted, wanted);
        EXPECT_TRUE(r.result.success) << "case " << i << " fidelity " << r.result.fidelity;
        const auto bad = run_game(alice, bob, std::nullopt, wanted);
        EXPECT_FALSE(bad.result.success) << "case " << i;
    }
}

TEST(Game, AbstractKindRejectsTypedInputs)
{
    Gen gen(405);
    GameOptions o;
    o.kind = ScenarioKind::Abstract;
    const Encoding alice = typed_encoding(gen);
    expect_code(ErrorCode::ScenarioMismatch, [&] {
        (void)run_game(alice, alice, std::nullopt, State::make(gen.density(2)), Mode::exact(), o);
    });
    expect_code(ErrorCode::ScenarioMismatch, [&] {
        (void)run_game(Encoding::identity(2), Encoding::identity(3), std::nullopt, State::make(gen.density(2)));
    });
}

TEST(Game, SampledModeIsDeterministicAndPasses)
{
    Gen gen(406);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    const auto planted = as_glparity(PUAElement::make(gen.unitary(2), 1));
    const Encoding bob = compose_onto(planted, alice);
    const State wanted = State::make(gen.density(2));
    const Mode mode = Mode::sampled(100000, 7);
    const auto a = run_game(alice, bob, planted, wanted, mode);
    const auto b = run_game(alice, bob, planted, wanted, mode);
    EXPECT_TRUE(a.result.success);
    EXPECT_EQ(a.transcript.to_text(), b.transcript.to_text());
}

TEST(Implementable, OnlyLinearElements)
{
    EXPECT_TRUE(implementable(GLParityElement::identity(2)));
    EXPECT_FALSE(implementable(GLParityElement::make(ComplexMatrix::identity(2), -1)));
    EXPECT_TRUE(implementable(PUAElement::identity(3)));
    EXPECT_FALSE(implementable(PUAElement::make(ComplexMatrix::identity(3), -1)));
}

// ---------------------------------------------------------------- agreement

TEST(AgreeAbstract, RecoversPlantedRotation)
{
    Gen gen(411);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    const auto planted = PUAElement::make(su2_rotation({0.0, 0.0, 1.0}, 0.7), 1);
    const Encoding bob = compose_onto(as_glparity(planted), alice);
    const auto r = agree_abstract_qubit(alice, bob, Mode::exact());
    EXPECT_EQ(r.recovered.parity(), 1);
    EXPECT_LT(projective_defect(r.recovered.U(), planted.U()), 1e-9);
    EXPECT_LT(r.residual, 1e-9);
}

TEST(AgreeAbstract, PropertyRecoversBothParities)
{
    Gen gen(412);
    for (int i = 0; i < 200; ++i) {
        const Encoding alice = Encoding::make(gen.unitary(2), 1);
        const auto planted = PUAElement::make(gen.unitary(2), gen.parity());
        const Encoding bob = compose_onto(as_glparity(planted), alice);
        const auto r = agree_abstract_qubit(alice, bob, Mode::exact());
        EXPECT_TRUE(projectively_equal(r.recovered, planted, 1e-8)) << "case " << i;
        EXPECT_LT(max_abs_diff(bloch_map(r.recovered), bloch_map(planted)), 1e-8) << "case " << i;
        // The recovered relation then wins the game.
        const State wanted = State::make(gen.density(2));
        EXPECT_TRUE(run_game(alice, bob, as_glparity(r.recovered), wanted).result.success) << "case " << i;
    }
}

TEST(AgreeAbstract, DriftHasNoConsistentRelation)
{
    Gen gen(413);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    BobOptions drift;
    drift.drift = su2_rotation({0.3, 0.5, -0.8}, 0.4);
    expect_code(ErrorCode::NoConsistentRelation,
                [&] { (void)agree_abstract_qubit(alice, alice, Mode::exact(), drift); });
}

TEST(AgreeAbstract, TranscriptIsDeterministic)
{
    Gen gen(414);
    const Encoding alice = Encoding::make(gen.unitary(2), 1);
    const Encoding bob = compose_onto(as_glparity(PUAElement::make(gen.unitary(2), -1)), alice);
    const Mode mode = Mode::sampled(20000, 3);
    const auto a = agree_abstract_qubit(alice, bob, mode);
    const auto b = agree_abstract_qubit(alice, bob, mode);
    EXPECT_EQ(a.transcript.to_text(), b.transcript.to_text());
    const auto c = agree_abstract_qubit(alice, bob, Mode::sampled(20000, 4));
    EXPECT_NE(a.transcript.to_text(), c.transcript.to_text());
}

TEST(AgreeTyped, ScaledIdentity)
{
    Gen gen(421);
    const Encoding alice = typed_encoding(gen);
    const auto planted = GLParityElement::make(ComplexMatrix::diagonal({2.0, 2.0}), 1);
    const auto r = agree_typed_qubit(alice, compose_onto(planted, alice), Mode::exact());
    EXPECT_EQ(r.recovered.kind(), 1);
    EXPECT_NEAR(r.lambda, 4.0, 1e-8);
    EXPECT_LT(max_abs_diff(r.lorentz, RealMatrix::identity(4)), 1e-8);
}

TEST(AgreeTyped, BoostGivesLorentzMatrix)
{
    Gen gen(422);
    const Encoding alice = typed_encoding(gen);
    const auto planted = GLParityElement::make(ComplexMatrix::diagonal({std::sqrt(2.0), 1.0 / std::sqrt(2.0)}), 1);
    const auto r = agree_typed_qubit(alice, compose_onto(planted, alice), Mode::exact());
    EXPECT_NEAR(r.lambda, 1.0, 1e-8);
    EXPECT_NEAR(r.lorentz(0, 0), 1.25, 1e-8);
    EXPECT_NEAR(r.lorentz(0, 3), 0.75, 1e-8);
}

TEST(AgreeTyped, PropertyRecoversScaledLorentz)
{
    Gen gen(423);
    for (int i = 0; i < 100; ++i) {
        const Encoding alice = typed_encoding(gen);
        const auto planted = GLParityElement::make(gen.bounded_invertible(2, 0.5), gen.parity());
        const auto r = agree_typed_qubit(alice, compose_onto(planted, alice), Mode::exact());
        const auto expected = decompose_scaled_lorentz(planted);
        EXPECT_EQ(r.recovered.kind(), planted.kind()) << "case " << i;
        EXPECT_NEAR(r.lambda, expected.lambda, 1e-7 * expected.lambda) << "case " << i;
        EXPECT_LT(max_abs_diff(r.lorentz, expected.lorentz), 1e-6) << "case " << i;
    }
}

// ---------------------------------------------------------------- request validation

TEST(Request, ValidateInvariants)
{
    Gen gen(431);
    const RequestMsg good = make_request(State::make(gen.density(2)), ScenarioKind::Abstract, Mode::exact());
    EXPECT_NO_THROW(validate(good));
    EXPECT_EQ(good.observables.size(), good.eigenvalues.size());

    RequestMsg ascending = good;
    std::reverse(ascending.eigenvalues[0].begin(), ascending.eigenvalues[0].end());
    expect_code(ErrorCode::InvalidArgument, [&] { validate(ascending); });

    RequestMsg bad_sum = good;
    bad_sum.probabilities[0][0] += 0.1;
    expect_code(ErrorCode::InvalidArgument, [&] { validate(bad_sum); });

    RequestMsg short_list = good;
    short_list.probabilities.pop_back();
    expect_code(ErrorCode::InvalidArgument, [&] { validate(short_list); });

    RequestMsg negative = good;
    negative.probabilities[0] = {1.2, -0.2};
    expect_code(ErrorCode::InvalidArgument, [&] { validate(negative); });
}

TEST(Request, DistinctEigenvaluesMergeCluster)
{
    const auto d = distinct_eigenvalues({1.0, 1.0 + 1e-12, 0.0, -1.0});
    EXPECT_EQ(d.size(), 3u);
    expect_code(ErrorCode::InvalidArgument, [] { (void)outcome_list({1.0, -1.0}, {1.0}); });
}

TEST(ChiSquared, PValueBounds)
{
    EXPECT_NEAR(chi_squared_p_value({{0.5, 0.5}}, {{500, 500}}), 1.0, 1e-12);
    EXPECT_LT(chi_squared_p_value({{0.5, 0.5}}, {{900, 100}}), 1e-10);
    EXPECT_EQ(chi_squared_p_value({{1.0, 0.0}}, {{9, 1}}), 0.0);
    // One degree of freedom, statistic 1: p = erfc(1/√2).
    EXPECT_NEAR(chi_squared_p_value({{0.5, 0.5}}, {{55, 45}}), std::erfc(1.0 / std::sqrt(2.0)), 1e-12);
}
