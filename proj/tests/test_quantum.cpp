#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "framegate/error.hpp"
#include "framegate/quantum.hpp"
#include "framegate/umgraph.hpp"
#include "support.hpp"

using namespace framegate;
using framegate::testing::Gen;

namespace {

State diag_state(double a, double b) { return State::make(ComplexMatrix::diagonal({a, b})); }

ComplexMatrix plus_x()
{
    const std::array<Complex, 2> v{1.0, 1.0};
    return pure_state(v);
}

std::vector<Measurement> exact_data(const State& rho, const std::vector<ComplexMatrix>& observables)
{
    std::vector<Measurement> data;
    for (const auto& m : observables) {
        const Observable o = Observable::make(m);
        data.push_back({o, born(rho, o)});
    }
    return data;
}

/// The Hermitian basis in a random orthonormal frame. Its eigenprojectors
/// span the Hermitian space with a frame-independent condition number;
/// d + 1 fully random observables can come arbitrarily close to losing rank.
std::vector<ComplexMatrix> generic_observables(Gen& gen, int dim)
{
    const ComplexMatrix v = gen.unitary(dim);
    std::vector<ComplexMatrix> out;
    for (const auto& b : hermitian_basis(dim)) {
        out.push_back(hermitian_part(v * b * v.adjoint()));
    }
    return out;
}

double spectrum_change(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const auto ea = herm_eig(a).eigenvalues;
    const auto eb = herm_eig(b).eigenvalues;
    double worst = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        worst = std::max(worst, std::abs(ea[i] - eb[i]));
    }
    return worst;
}

}  // namespace

TEST(ApplyEncoding, IdentityLeavesStateAlone)
{
    Gen gen(1);
    const State rho = State::make(gen.density(3));
    const State out = apply_encoding(Encoding::identity(3), rho);
    EXPECT_LT(max_abs_diff(out.rho(), rho.rho()), 1e-15);
}

TEST(ApplyEncoding, PauliXSwapsBasis)
{
    const State out = apply_encoding(Encoding::make(pauli_x(), 1), diag_state(1.0, 0.0));
    EXPECT_LT(max_abs_diff(out.rho(), ComplexMatrix::diagonal({0.0, 1.0})), 1e-15);
}

TEST(ApplyEncoding, BoostNormalisedUnderMetric)
{
    const Encoding phi = Encoding::make(ComplexMatrix::diagonal({std::sqrt(2.0), std::sqrt(0.5)}), 1);
    const State out = apply_encoding(phi, diag_state(1.0, 0.0));
    EXPECT_LT(max_abs_diff(out.rho(), ComplexMatrix::diagonal({2.0, 0.0})), 1e-14);
    // Frozen: R⁻² = (XX†)⁻¹ = diag(1/2, 2), so tr(ρ' R⁻²) = 2 · 1/2.
    EXPECT_NEAR((out.rho() * out.metric_weight()).trace().real(), 1.0, 1e-14);
    EXPECT_LT(max_abs_diff(out.metric_weight(), ComplexMatrix::diagonal({0.5, 2.0})), 1e-14);
}

TEST(ApplyEncoding, ParityMinusConjugatesAndTransposes)
{
    Gen gen(2);
    const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
    const ComplexMatrix rho = gen.density(2);
    const Encoding phi = Encoding::make(x, -1);
    const ComplexMatrix xc = phi.X().conj();
    EXPECT_LT(max_abs_diff(apply_encoding(phi, State::make(rho)).rho(), xc * rho.transpose() * xc.adjoint()), 1e-13);
}

TEST(ApplyEncodingObservable, BoostedSigmaZ)
{
    const Encoding phi = Encoding::make(ComplexMatrix::diagonal({std::sqrt(2.0), std::sqrt(0.5)}), 1);
    const Observable out = apply_encoding_observable(phi, Observable::make(pauli_z()));
    EXPECT_LT(max_abs_diff(out.matrix, ComplexMatrix::diagonal({2.0, -0.5})), 1e-14);
}

TEST(ApplyEncodingObservable, IdentityEncoding)
{
    const Observable out = apply_encoding_observable(Encoding::identity(2), Observable::make(pauli_y()));
    EXPECT_LT(max_abs_diff(out.matrix, pauli_y()), 1e-15);
}

TEST(ApplyEncodingObservable, PropertyDualityPreservesExpectations)
{
    Gen gen(3);
    for (int i = 0; i < 100; ++i) {
        const int dim = 2 + gen.index(3);
        const Encoding phi = Encoding::make(gen.bounded_invertible(dim, 0.6), gen.parity());
        const ComplexMatrix rho = gen.density(dim);
        const ComplexMatrix m = gen.hermitian(dim);
        const double lhs = (encode_matrix(phi, rho) * m).trace().real();
        const double rhs = (rho * apply_encoding_observable(phi, Observable::make(m)).matrix).trace().real();
        EXPECT_NEAR(lhs, rhs, 1e-10) << "case " << i;
    }
}

TEST(Born, EigenstateAndMixed)
{
    const auto up = born(diag_state(1.0, 0.0), Observable::make(pauli_z()));
    ASSERT_EQ(up.size(), 2u);
    EXPECT_DOUBLE_EQ(up[0].eigenvalue, 1.0);
    EXPECT_NEAR(up[0].probability, 1.0, 1e-15);
    EXPECT_NEAR(up[1].probability, 0.0, 1e-15);

    const auto mixed = born(diag_state(0.5, 0.5), Observable::make(pauli_x()));
    EXPECT_NEAR(mixed[0].probability, 0.5, 1e-15);
    EXPECT_NEAR(mixed[1].probability, 0.5, 1e-15);
}

TEST(Born, PlusStateOnSigmaZ)
{
    // Oracle: ⟨0|ρ|0⟩ and ⟨1|ρ|1⟩ read straight off the projector arithmetic.
    const ComplexMatrix rho = plus_x();
    const auto out = born(State::make(rho), Observable::make(pauli_z()));
    EXPECT_NEAR(out[0].probability, rho(0, 0).real(), 1e-15);
    EXPECT_NEAR(out[1].probability, rho(1, 1).real(), 1e-15);
    EXPECT_NEAR(out[0].probability, 0.5, 1e-15);
}

TEST(Born, DegenerateClustersMerge)
{
    Gen gen(4);
    const auto out = born(State::make(gen.density(3)), Observable::make(ComplexMatrix::diagonal({1.0, 1.0, -1.0})));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_NEAR(out[0].probability + out[1].probability, 1.0, 1e-12);
}

TEST(Born, DimensionMismatch)
{
    try {
        (void)born(diag_state(1.0, 0.0), Observable::make(ComplexMatrix::identity(3)));
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(Tomography, QubitEigenstateRoundTrip)
{
    const State rho = diag_state(1.0, 0.0);
    const auto result = tomography(2, exact_data(rho, {pauli_x(), pauli_y(), pauli_z()}));
    EXPECT_LT(max_abs_diff(result.state.rho(), rho.rho()), 1e-12);
    EXPECT_EQ(result.rank, 4);
}

TEST(Tomography, SingleObservableIsIncomplete)
{
    try {
        (void)tomography(2, exact_data(diag_state(1.0, 0.0), {pauli_z()}));
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Incomplete);
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
    }
}

TEST(Tomography, SpinOneFiveDirections)
{
    Gen gen(5);
    std::vector<ComplexMatrix> obs;
    for (const auto& n : five_directions()) {
        obs.push_back(spin_along(Spin{2}, n));
    }
    for (int i = 0; i < 50; ++i) {
        const State rho = State::make(gen.density(3));
        const auto result = tomography(3, exact_data(rho, obs));
        EXPECT_LT(max_abs_diff(result.state.rho(), rho.rho()), 1e-9) << "case " << i;
    }
}

TEST(Tomography, InconsistentDataRejected)
{
    auto data = exact_data(diag_state(1.0, 0.0), {pauli_x(), pauli_y(), pauli_z(), pauli_z()});
    data[3].distribution[0].probability = 0.0;
    data[3].distribution[1].probability = 1.0;
    try {
        (void)tomography(2, data);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Inconsistent);
    }
}

TEST(Tomography, PropertyBornRoundTrip)
{
    Gen gen(6);
    for (int dim = 2; dim <= 4; ++dim) {
        for (int i = 0; i < 1000; ++i) {
            const State rho = State::make(gen.density(dim));
            const auto result = tomography(dim, exact_data(rho, generic_observables(gen, dim)));
            ASSERT_LT(max_abs_diff(result.state.rho(), rho.rho()), 1e-9) << "dim " << dim << " case " << i;
        }
    }
}

TEST(ReconstructRelation, IdenticalPairsGiveIdentity)
{
    std::vector<std::pair<State, State>> pairs;
    for (const auto& m : {pauli_x(), pauli_y(), pauli_z()}) {
        const State s = State::make((ComplexMatrix::identity(2) + m) * Complex(0.5));
        pairs.emplace_back(s, s);
    }
    const auto fit = reconstruct_relation(pairs);
    EXPECT_EQ(fit.encoding.parity(), 1);
    EXPECT_LT(projective_defect(fit.encoding.X(), ComplexMatrix::identity(2)), 1e-12);
}

TEST(ReconstructRelation, RecoversQuarterTurnAboutX)
{
    const ComplexMatrix u0 = su2_rotation({1.0, 0.0, 0.0}, M_PI / 2);
    std::vector<std::pair<State, State>> pairs;
    for (const auto& m : {pauli_x(), pauli_y(), pauli_z()}) {
        const ComplexMatrix rho = (ComplexMatrix::identity(2) + m) * Complex(0.5);
        pairs.emplace_back(State::make(rho), State::make(u0 * rho * u0.adjoint()));
    }
    const auto fit = reconstruct_relation(pairs);
    EXPECT_EQ(fit.encoding.parity(), 1);
    EXPECT_NEAR(std::abs(hs_inner(fit.encoding.X(), u0)), 2.0, 1e-12);
}

TEST(ReconstructRelation, TransposeIsAntiunitary)
{
    std::vector<std::pair<State, State>> pairs;
    for (const auto& m : {pauli_x(), pauli_y(), pauli_z()}) {
        const ComplexMatrix rho = (ComplexMatrix::identity(2) + m) * Complex(0.5);
        pairs.emplace_back(State::make(rho), State::make(rho.transpose()));
        // Oracle: the y Bloch component flips sign, x and z are kept.
        const auto before = framegate::testing::bloch(rho);
        const auto after = framegate::testing::bloch(rho.transpose());
        EXPECT_NEAR(after[0], before[0], 1e-15);
        EXPECT_NEAR(after[1], -before[1], 1e-15);
        EXPECT_NEAR(after[2], before[2], 1e-15);
    }
    const auto fit = reconstruct_relation(pairs);
    EXPECT_EQ(fit.encoding.parity(), -1);
    EXPECT_LT(projective_defect(fit.encoding.X(), ComplexMatrix::identity(2)), 1e-12);
}

TEST(ReconstructRelation, SpanDeficiencyIsUnderdetermined)
{
    const State s = diag_state(1.0, 0.0);
    try {
        (void)reconstruct_relation({{s, s}, {diag_state(0.0, 1.0), diag_state(0.0, 1.0)}});
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Underdetermined);
    }
}

TEST(ReconstructRelation, NonConjugationHasNoConsistentRelation)
{
    // Depolarising the received states is not a unitary or antiunitary map.
    std::vector<std::pair<State, State>> pairs;
    for (const auto& m : {pauli_x(), pauli_y(), pauli_z()}) {
        const ComplexMatrix rho = (ComplexMatrix::identity(2) + m) * Complex(0.5);
        pairs.emplace_back(State::make(rho), State::make((ComplexMatrix::identity(2) + m * Complex(0.8)) * Complex(0.5)));
    }
    try {
        (void)reconstruct_relation(pairs);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoConsistentRelation);
    }
}

TEST(ReconstructRelation, PropertyRoundTrip)
{
    Gen gen(7);
    for (int i = 0; i < 1000; ++i) {
        const int dim = 2 + gen.index(3);
        const Encoding planted = Encoding::make(gen.unitary(dim), gen.parity());
        std::vector<std::pair<State, State>> pairs;
        for (int k = 0; k < dim * dim; ++k) {
            const State rho = State::make(gen.density(dim));
            pairs.emplace_back(rho, apply_encoding(planted, rho));
        }
        const auto fit = reconstruct_relation(pairs);
        ASSERT_EQ(fit.encoding.parity(), planted.parity()) << "case " << i;
        ASSERT_LT(projective_defect(fit.encoding.X(), planted.X()), 1e-9) << "case " << i;
    }
}

TEST(SampleOutcomes, ZeroCopies) { EXPECT_TRUE(sample_outcomes(diag_state(1.0, 0.0), Observable::make(pauli_z()), 0, 1).empty()); }

TEST(SampleOutcomes, EigenstateAllOnOneOutcome)
{
    const auto counts = sample_outcomes(diag_state(1.0, 0.0), Observable::make(pauli_z()), 1000, 3);
    ASSERT_EQ(counts.size(), 2u);
    EXPECT_EQ(counts[0].count, 1000u);
    EXPECT_EQ(counts[1].count, 0u);
}

TEST(SampleOutcomes, MixedStateFrequencies)
{
    constexpr std::uint64_t n = 1000000;
    const auto counts = sample_outcomes(diag_state(0.5, 0.5), Observable::make(pauli_z()), n, 17);
    for (const auto& c : counts) {
        EXPECT_NEAR(static_cast<double>(c.count) / n, 0.5, 0.002);
    }
    const auto again = sample_outcomes(diag_state(0.5, 0.5), Observable::make(pauli_z()), n, 17);
    EXPECT_EQ(again[0].count, counts[0].count);
}

TEST(EncodingProperties, ConvexLinear)
{
    Gen gen(8);
    for (int i = 0; i < 200; ++i) {
        const int dim = 2 + gen.index(3);
        const Encoding phi = Encoding::make(gen.bounded_invertible(dim, 0.5), gen.parity());
        const ComplexMatrix a = gen.density(dim);
        const ComplexMatrix b = gen.density(dim);
        const double t = gen.uniform(0.0, 1.0);
        const ComplexMatrix mix = a * Complex(t) + b * Complex(1.0 - t);
        const ComplexMatrix lhs = encode_matrix(phi, mix);
        const ComplexMatrix rhs = encode_matrix(phi, a) * Complex(t) + encode_matrix(phi, b) * Complex(1.0 - t);
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12) << "case " << i;
    }
}

TEST(EncodingProperties, UnitaryEncodingsKeepSpectra)
{
    Gen gen(9);
    for (int i = 0; i < 200; ++i) {
        const int dim = 2 + gen.index(3);
        const Encoding phi = Encoding::make(gen.unitary(dim), gen.parity());
        const ComplexMatrix rho = gen.density(dim);
        const ComplexMatrix m = gen.hermitian(dim);
        EXPECT_LT(spectrum_change(encode_matrix(phi, rho), rho), 1e-10);
        EXPECT_LT(spectrum_change(apply_encoding_observable(phi, Observable::make(m)).matrix, m), 1e-10);
    }
}

TEST(EncodingProperties, NonUnitaryEncodingsChangeSomeSpectrum)
{
    Gen gen(10);
    const std::vector<ComplexMatrix> probes{ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()};
    for (int i = 0; i < 200; ++i) {
        const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
        if (max_abs_diff(x * x.adjoint(), ComplexMatrix::identity(2)) <= 1e-6) {
            continue;
        }
        const Encoding phi = Encoding::make(x, gen.parity());
        double worst = 0.0;
        for (const auto& p : probes) {
            worst = std::max(worst, spectrum_change(apply_encoding_observable(phi, Observable::make(p)).matrix, p));
        }
        EXPECT_GT(worst, 1e-6) << "case " << i;
    }
}

TEST(Encoding, CanonicalPhase)
{
    Gen gen(11);
    const ComplexMatrix u = gen.unitary(2);
    const Encoding a = Encoding::make(u, 1);
    const Encoding b = Encoding::make(u * Complex(std::polar(1.0, 1.3)), 1);
    EXPECT_LT(max_abs_diff(a.X(), b.X()), 1e-14);
    EXPECT_NEAR(a.X()(0, 0).imag(), 0.0, 1e-15);
}

TEST(State, MetricNormalisationEnforced)
{
    try {
        (void)State::make(ComplexMatrix::diagonal({1.0, 0.0}), ComplexMatrix::diagonal({2.0, 1.0}));
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPhysical);
    }
}

TEST(Fidelity, PureStatesGiveOverlap)
{
    const ComplexMatrix a = plus_x();
    const ComplexMatrix b = ComplexMatrix::diagonal({1.0, 0.0});
    EXPECT_NEAR(fidelity(a, b), 0.5, 1e-12);
    EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
}
