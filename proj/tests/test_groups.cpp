#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "framegate/error.hpp"
#include "framegate/groups.hpp"
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

constexpr double ln2 = std::numbers::ln2;

double max_entry(const RealMatrix& m)
{
    double out = 0.0;
    for (double x : m.entries()) {
        out = std::max(out, std::abs(x));
    }
    return out;
}

// G G† with G Ginibre.
ComplexMatrix psd(Gen& gen, int dim)
{
    const ComplexMatrix g = ginibre(dim, gen.rng());
    return g * g.adjoint();
}

bool is_psd(const ComplexMatrix& m, double tol)
{
    return herm_eig(hermitian_part(m)).eigenvalues.back() >= -tol;
}

}  // namespace

// ---------------------------------------------------------------- PUA

TEST(PUA, ComposeTwoUnitaries)
{
    const auto a = PUAElement::make(pauli_x(), 1);
    const auto b = PUAElement::make(pauli_z(), 1);
    const auto c = pua_compose(a, b);
    EXPECT_EQ(c.parity(), 1);
    EXPECT_LT(projective_defect(c.U(), pauli_x() * pauli_z()), 1e-14);
}

TEST(PUA, AntiunitaryConjugatesRightFactor)
{
    const auto a = PUAElement::make(ComplexMatrix::identity(2), -1);
    const auto b = PUAElement::make(pauli_y(), 1);
    const auto c = pua_compose(a, b);
    EXPECT_EQ(c.parity(), -1);
    EXPECT_LT(projective_defect(c.U(), pauli_y().conj()), 1e-14);
    // Two transposes cancel.
    EXPECT_EQ(pua_compose(a, a).parity(), 1);
}

TEST(PUA, PropertyComposeMatchesSequentialAction)
{
    Gen gen(101);
    for (int i = 0; i < 200; ++i) {
        const int dim = 2 + gen.index(3);
        const auto a = PUAElement::make(gen.unitary(dim), gen.parity());
        const auto b = PUAElement::make(gen.unitary(dim), gen.parity());
        const ComplexMatrix m = gen.hermitian(dim);
        EXPECT_LT(max_abs_diff(act(pua_compose(a, b), m), act(a, act(b, m))), 1e-12) << "case " << i;
        const auto inv = pua_inverse(a);
        EXPECT_LT(max_abs_diff(act(pua_compose(a, inv), m), m), 1e-12) << "case " << i;
    }
}

TEST(PUA, RejectsNonUnitary)
{
    expect_code(ErrorCode::InvalidArgument, [] { (void)PUAElement::make(ComplexMatrix::diagonal({2.0, 1.0}), 1); });
    expect_code(ErrorCode::InvalidArgument, [] { (void)PUAElement::make(ComplexMatrix::identity(2), 0); });
}

// ---------------------------------------------------------------- GL-parity

TEST(GLParity, CompositionTableRows)
{
    Gen gen(111);
    const ComplexMatrix y = gen.bounded_invertible(2, 0.5);
    const ComplexMatrix z = gen.bounded_invertible(2, 0.5);
    struct Row {
        int a;
        int b;
        ComplexMatrix expected;
        int kind;
    };
    const std::vector<Row> rows{
        {1, 1, y * z, 1},
        {-1, -1, y * z.conj(), 1},
        {-1, 1, y * z.conj(), -1},
        {1, -1, y * z, -1},
    };
    for (const auto& row : rows) {
        const auto c = glparity_compose(GLParityElement::make(y, row.a), GLParityElement::make(z, row.b));
        EXPECT_EQ(c.kind(), row.kind);
        EXPECT_LT(framegate::testing::phase_free_distance(c.Y(), row.expected), 1e-12)
            << "row (" << row.a << ", " << row.b << ")";
    }
}

TEST(GLParity, PropertyComposeMatchesSequentialAction)
{
    Gen gen(112);
    for (int i = 0; i < 200; ++i) {
        const int dim = 2 + gen.index(3);
        const auto a = GLParityElement::make(gen.bounded_invertible(dim, 0.7), gen.parity());
        const auto b = GLParityElement::make(gen.bounded_invertible(dim, 0.7), gen.parity());
        const auto c = GLParityElement::make(gen.bounded_invertible(dim, 0.7), gen.parity());
        const ComplexMatrix m = gen.hermitian(dim);
        const ComplexMatrix seq = act(a, act(b, m));
        EXPECT_LT(max_abs_diff(act(glparity_compose(a, b), m), seq), 1e-10 * std::max(1.0, max_abs(seq)))
            << "case " << i;
        const auto left = glparity_compose(glparity_compose(a, b), c);
        const auto right = glparity_compose(a, glparity_compose(b, c));
        EXPECT_EQ(left.kind(), right.kind());
        EXPECT_LT(framegate::testing::phase_free_distance(left.Y(), right.Y()), 1e-10) << "case " << i;
        const auto id = glparity_compose(a, glparity_inverse(a));
        EXPECT_EQ(id.kind(), 1);
        EXPECT_LT(max_abs_diff(act(id, m), m), 1e-10 * std::max(1.0, max_abs(m))) << "case " << i;
    }
}

TEST(GLParity, DualActionPreservesPairing)
{
    Gen gen(113);
    for (int i = 0; i < 100; ++i) {
        const int dim = 2 + gen.index(3);
        const auto g = GLParityElement::make(gen.bounded_invertible(dim, 0.7), gen.parity());
        const ComplexMatrix rho = gen.density(dim);
        const ComplexMatrix m = gen.hermitian(dim);
        const Complex before = (rho * m).trace();
        const Complex after = (act(g, rho) * act_dual(g, m)).trace();
        EXPECT_NEAR(before.real(), after.real(), 1e-10) << "case " << i;
    }
}

TEST(GLParity, RejectsSingular)
{
    expect_code(ErrorCode::Singular, [] { (void)GLParityElement::make(ComplexMatrix::diagonal({1.0, 0.0}), 1); });
}

TEST(GLParity, DescriptorActionFollowsTable)
{
    Gen gen(114);
    const ComplexMatrix w = gen.bounded_invertible(2, 0.5);
    const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
    const auto plus = GLParityElement::make(w, 1);
    const auto minus = GLParityElement::make(w, -1);
    const ComplexMatrix wc = plus.Y();

    auto r = act_on_descriptor(plus, {x, 1});
    EXPECT_EQ(r.parity, 1);
    EXPECT_LT(max_abs_diff(r.X, wc * x), 1e-12);
    r = act_on_descriptor(plus, {x, -1});
    EXPECT_EQ(r.parity, -1);
    EXPECT_LT(max_abs_diff(r.X, wc.conj() * x), 1e-12);
    r = act_on_descriptor(minus, {x, 1});
    EXPECT_EQ(r.parity, -1);
    EXPECT_LT(max_abs_diff(r.X, wc.conj() * x), 1e-12);
    r = act_on_descriptor(minus, {x, -1});
    EXPECT_EQ(r.parity, 1);
    EXPECT_LT(max_abs_diff(r.X, wc * x), 1e-12);
}

TEST(GLParity, OrderPreservationProperty)
{
    // A ≤ B implies g(A) ≤ g(B) for every element, both kinds.
    Gen gen(115);
    for (int i = 0; i < 1000; ++i) {
        const int dim = 2 + gen.index(3);
        const auto g = GLParityElement::make(gen.bounded_invertible(dim, 0.7), gen.parity());
        const ComplexMatrix a = gen.hermitian(dim);
        const ComplexMatrix b = a + psd(gen, dim);
        const ComplexMatrix gap = act(g, b) - act(g, a);
        EXPECT_TRUE(is_psd(gap, 1e-10 * std::max(1.0, max_abs(gap)))) << "case " << i;
    }
}

TEST(GLParity, ConjugationIsAnIsomorphism)
{
    Gen gen(116);
    for (int i = 0; i < 100; ++i) {
        const auto f = GLParityElement::make(gen.bounded_invertible(2, 0.6), gen.parity());
        const auto f_inv = glparity_inverse(f);
        auto conj = [&](const GLParityElement& g) { return glparity_compose(f, glparity_compose(g, f_inv)); };
        const auto a = GLParityElement::make(gen.bounded_invertible(2, 0.6), gen.parity());
        const auto b = GLParityElement::make(gen.bounded_invertible(2, 0.6), gen.parity());
        const auto lhs = conj(glparity_compose(a, b));
        const auto rhs = glparity_compose(conj(a), conj(b));
        EXPECT_EQ(lhs.kind(), rhs.kind());
        const ComplexMatrix m = gen.hermitian(2);
        const ComplexMatrix x = act(lhs, m);
        EXPECT_LT(max_abs_diff(x, act(rhs, m)), 1e-10 * std::max(1.0, max_abs(x))) << "case " << i;
    }
}

TEST(CorrectingTransformation, SameParityFrames)
{
    Gen gen(121);
    const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
    const ComplexMatrix y = gen.bounded_invertible(2, 0.5);
    const auto plus = correcting_transformation(x, 1, y, true);
    EXPECT_EQ(plus.parity, 1);
    EXPECT_LT(max_abs_diff(plus.X, inverse(y) * x), 1e-12);
    const auto minus = correcting_transformation(x, -1, y, true);
    EXPECT_EQ(minus.parity, -1);
    EXPECT_LT(max_abs_diff(minus.X, inverse(y).conj() * x), 1e-12);
}

TEST(CorrectingTransformation, OppositeParityFrames)
{
    Gen gen(122);
    const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
    const ComplexMatrix y = gen.bounded_invertible(2, 0.5);
    const auto a = correcting_transformation(x, 1, y, false);
    EXPECT_EQ(a.parity, -1);
    EXPECT_LT(max_abs_diff(a.X, inverse(y).conj() * x), 1e-12);
    const auto b = correcting_transformation(x, -1, y, false);
    EXPECT_EQ(b.parity, 1);
    EXPECT_LT(max_abs_diff(b.X, inverse(y) * x), 1e-12);
}

TEST(CorrectingTransformation, PreservesObservablesSeenByBob)
{
    // Bob's reference observables are Y† M Y of Alice's; rewriting Alice's
    // descriptor must leave the system-side observable unchanged.
    Gen gen(123);
    for (int i = 0; i < 100; ++i) {
        const ComplexMatrix x = gen.bounded_invertible(2, 0.5);
        const ComplexMatrix y = gen.bounded_invertible(2, 0.5);
        const ComplexMatrix m_alice = gen.hermitian(2);
        const auto bob = correcting_transformation(x, 1, y, true);
        const ComplexMatrix seen_by_alice = x.adjoint() * m_alice * x;
        // (Y⁻¹X)† (Y† M Y)(Y⁻¹X) = X† M X
        const ComplexMatrix direct = bob.X.adjoint() * (y.adjoint() * m_alice * y) * bob.X;
        EXPECT_LT(max_abs_diff(direct, seen_by_alice), 1e-10 * std::max(1.0, max_abs(seen_by_alice)))
            << "case " << i;
    }
}

// ---------------------------------------------------------------- scaling

TEST(SplitScaling, MultipleOfIdentity)
{
    const auto s = split_scaling(ComplexMatrix::diagonal({2.0, 2.0}));
    EXPECT_NEAR(s.lambda, 4.0, 1e-14);
    EXPECT_LT(max_abs_diff(s.Z, ComplexMatrix::identity(2)), 1e-14);
}

TEST(SplitScaling, UnitaryHasUnitScale)
{
    Gen gen(131);
    const auto s = split_scaling(gen.unitary(3));
    EXPECT_NEAR(s.lambda, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(det(s.Z) - 1.0), 0.0, 1e-12);
}

TEST(SplitScaling, PropertyReproducesAction)
{
    Gen gen(132);
    for (int i = 0; i < 200; ++i) {
        const int dim = 2 + gen.index(3);
        const ComplexMatrix y = gen.bounded_invertible(dim, 0.8);
        const auto s = split_scaling(y);
        EXPECT_LT(std::abs(det(s.Z) - 1.0), 1e-10) << "case " << i;
        const ComplexMatrix m = gen.hermitian(dim);
        const ComplexMatrix direct = y * m * y.adjoint();
        const ComplexMatrix split = s.Z * m * s.Z.adjoint() * Complex(s.lambda);
        EXPECT_LT(max_abs_diff(direct, split), 1e-10 * std::max(1.0, max_abs(direct))) << "case " << i;
        // Canonical root: the same split for every phase of y.
        const auto rotated = split_scaling(y * std::polar(1.0, gen.uniform(-3.0, 3.0)));
        EXPECT_LT(max_abs_diff(rotated.Z, s.Z), 1e-10) << "case " << i;
    }
}

// ---------------------------------------------------------------- four-vectors

TEST(FourVector, NullVectorExample)
{
    const ComplexMatrix h = fourvector_to_hermitian({1.0, 1.0, 0.0, 0.0});
    EXPECT_LT(max_abs_diff(h, ComplexMatrix(2, {1.0, 1.0, 1.0, 1.0})), 1e-15);
    EXPECT_NEAR(det(h).real(), 0.0, 1e-15);
}

TEST(FourVector, RoundTrip)
{
    Gen gen(141);
    for (int i = 0; i < 100; ++i) {
        const FourVector x{gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2)};
        const ComplexMatrix h = fourvector_to_hermitian(x);
        const FourVector back = hermitian_to_fourvector(h);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_NEAR(back[k], x[k], 1e-14);
        }
        // det H is the Minkowski square.
        EXPECT_NEAR(det(h).real(), x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3], 1e-12);
    }
}

// ---------------------------------------------------------------- Lorentz

TEST(Lorentz, DiagonalBoostMatchesTraceFormula)
{
    const ComplexMatrix x = ComplexMatrix::diagonal({std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    const auto l = sl2c_to_lorentz(x);
    const RealMatrix oracle = framegate::testing::trace_formula_lorentz(x);
    EXPECT_LT(max_abs_diff(l.m, oracle), 1e-12);
    EXPECT_NEAR(l(0, 0), 1.25, 1e-12);
    EXPECT_NEAR(l(3, 3), 1.25, 1e-12);
    EXPECT_NEAR(l(0, 3), 0.75, 1e-12);
    EXPECT_NEAR(l(3, 0), 0.75, 1e-12);
    EXPECT_NEAR(l(1, 1), 1.0, 1e-12);
    EXPECT_NEAR(l(2, 2), 1.0, 1e-12);
}

TEST(Lorentz, QuarterTurnAboutZ)
{
    const ComplexMatrix x = su2_rotation({0.0, 0.0, 1.0}, std::numbers::pi / 2.0);
    const auto l = sl2c_to_lorentz(x);
    EXPECT_LT(max_abs_diff(l.m, framegate::testing::trace_formula_lorentz(x)), 1e-12);
    EXPECT_NEAR(l(2, 1), 1.0, 1e-12);
    EXPECT_NEAR(l(1, 2), -1.0, 1e-12);
    EXPECT_NEAR(l(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(l(3, 3), 1.0, 1e-12);
}

TEST(Lorentz, RejectsNonUnimodular)
{
    expect_code(ErrorCode::NotUnimodular, [] { (void)sl2c_to_lorentz(ComplexMatrix::diagonal({2.0, 1.0})); });
}

TEST(Lorentz, InverseMapOnIdentity)
{
    EXPECT_LT(max_abs_diff(lorentz_to_sl2c(LorentzMatrix{}), ComplexMatrix::identity(2)), 1e-14);
}

TEST(Lorentz, InverseMapOnBoost)
{
    const ComplexMatrix x = lorentz_to_sl2c(boost({0.0, 0.0, ln2}));
    const ComplexMatrix expected = ComplexMatrix::diagonal({std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
    EXPECT_TRUE(max_abs_diff(x, expected) < 1e-12 || max_abs_diff(x, -expected) < 1e-12);
}

TEST(Lorentz, FullTurnIsIdentity)
{
    const auto l = spatial_rotation(rotation_matrix({0.3, -0.4, 0.5}, 2.0 * std::numbers::pi));
    const ComplexMatrix x = lorentz_to_sl2c(l);
    EXPECT_LT(framegate::testing::phase_free_distance(x, ComplexMatrix::identity(2)), 1e-12);
}

TEST(Lorentz, RoundTripProperty)
{
    Gen gen(151);
    for (int i = 0; i < 500; ++i) {
        const ComplexMatrix x = gen.sl2c(0.8);
        const ComplexMatrix back = lorentz_to_sl2c(sl2c_to_lorentz(x));
        EXPECT_TRUE(max_abs_diff(back, x) < 1e-9 || max_abs_diff(back, -x) < 1e-9) << "case " << i;
    }
}

TEST(Lorentz, RejectsImproper)
{
    LorentzMatrix parity;
    parity.m = RealMatrix(4, 4, {1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1});
    expect_code(ErrorCode::NotProperOrthochronous, [&] { (void)lorentz_to_sl2c(parity); });
    LorentzMatrix time_reversal;
    time_reversal.m = RealMatrix(4, 4, {-1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
    expect_code(ErrorCode::NotProperOrthochronous, [&] { (void)lorentz_to_sl2c(time_reversal); });
}

TEST(Lorentz, HomomorphismAndInvariants)
{
    Gen gen(152);
    const RealMatrix& eta = minkowski_metric();
    for (int i = 0; i < 500; ++i) {
        const ComplexMatrix a = gen.sl2c(0.8);
        const ComplexMatrix b = gen.sl2c(0.8);
        const auto la = sl2c_to_lorentz(a);
        const auto lb = sl2c_to_lorentz(b);
        const auto lab = sl2c_to_lorentz(a * b);
        const double scale = std::max(1.0, max_entry(lab.m));
        EXPECT_LT(max_abs_diff(lab.m, la.m * lb.m), 1e-10 * scale) << "case " << i;
        EXPECT_LT(max_abs_diff(la.m.transpose() * eta * la.m, eta), 1e-10 * scale * scale) << "case " << i;
        EXPECT_NEAR(det(la.m), 1.0, 1e-9 * scale) << "case " << i;
        EXPECT_GT(la(0, 0), 0.0);
        EXPECT_LT(max_abs_diff(sl2c_to_lorentz(-a).m, la.m), 1e-14 * scale) << "case " << i;
        EXPECT_LT(max_abs_diff(la.m, framegate::testing::trace_formula_lorentz(a)), 1e-12 * scale);
    }
}

TEST(Lorentz, ScaledDecompositionOfTwoIdentity)
{
    const auto d = decompose_scaled_lorentz(GLParityElement::make(ComplexMatrix::diagonal({2.0, 2.0}), 1));
    EXPECT_NEAR(d.lambda, 4.0, 1e-14);
    EXPECT_LT(max_abs_diff(d.lorentz, RealMatrix::identity(4)), 1e-14);
}

TEST(Lorentz, FourVectorMapFactorsAsScaleTimesLorentz)
{
    Gen gen(153);
    for (int i = 0; i < 200; ++i) {
        const auto g = GLParityElement::make(gen.bounded_invertible(2, 0.6), gen.parity());
        const auto d = decompose_scaled_lorentz(g);
        const RealMatrix map = fourvector_map(g);
        EXPECT_LT(max_abs_diff(map, d.lambda * d.lorentz), 1e-10 * std::max(1.0, max_entry(map))) << "case " << i;
        EXPECT_LT(lorentz_defect(d.lorentz), 1e-9 * std::max(1.0, max_entry(d.lorentz) * max_entry(d.lorentz)));
    }
}

// ---------------------------------------------------------------- rotations

TEST(Bloch, IdentityAndTranspose)
{
    EXPECT_LT(max_abs_diff(bloch_map(PUAElement::identity(2)), RealMatrix::identity(3)), 1e-15);
    const RealMatrix flip = bloch_map(PUAElement::make(ComplexMatrix::identity(2), -1));
    EXPECT_LT(max_abs_diff(flip, RealMatrix(3, 3, {1, 0, 0, 0, -1, 0, 0, 0, 1})), 1e-15);
}

TEST(Bloch, RotationAboutZ)
{
    const double angle = 0.9;
    const RealMatrix r = bloch_map(PUAElement::make(su2_rotation({0.0, 0.0, 1.0}, angle), 1));
    EXPECT_LT(max_abs_diff(r, rotation_matrix({0.0, 0.0, 1.0}, angle)), 1e-14);
}

TEST(Bloch, HomomorphismProperty)
{
    Gen gen(161);
    for (int i = 0; i < 300; ++i) {
        const auto a = PUAElement::make(gen.unitary(2), gen.parity());
        const auto b = PUAElement::make(gen.unitary(2), gen.parity());
        EXPECT_LT(max_abs_diff(bloch_map(pua_compose(a, b)), bloch_map(a) * bloch_map(b)), 1e-12) << "case " << i;
        EXPECT_NEAR(det(bloch_map(a)), a.parity(), 1e-12);
    }
}

TEST(SU2, HalfTurnAboutX)
{
    const ComplexMatrix u = su2_from_so3(rotation_matrix({1.0, 0.0, 0.0}, std::numbers::pi));
    EXPECT_LT(framegate::testing::phase_free_distance(u, pauli_x()), 1e-14);
}

TEST(SU2, InvertsBlochMap)
{
    Gen gen(171);
    for (int i = 0; i < 300; ++i) {
        const auto axis = gen.unit_vector();
        const double angle = gen.uniform(-3.1, 3.1);
        const RealMatrix r = rotation_matrix(axis, angle);
        const ComplexMatrix u = su2_from_so3(r);
        EXPECT_NEAR(std::abs(det(u) - 1.0), 0.0, 1e-12);
        EXPECT_LT(max_abs_diff(bloch_map(PUAElement::make(u, 1)), r), 1e-12) << "case " << i;
        EXPECT_LT(framegate::testing::phase_free_distance(u, su2_rotation(axis, angle)), 1e-12) << "case " << i;
    }
}

TEST(SU2, RejectsReflection)
{
    expect_code(ErrorCode::NotRotation, [] { (void)su2_from_so3(RealMatrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, -1})); });
    expect_code(ErrorCode::NotRotation, [] { (void)su2_from_so3(RealMatrix(3, 3, {2, 0, 0, 0, 1, 0, 0, 0, 0.5})); });
}

// ---------------------------------------------------------------- spin

TEST(Spin, HalfIsHalfPauli)
{
    const auto s = spin_matrices(Spin{1});
    EXPECT_LT(max_abs_diff(s.Sx, pauli_x() * Complex(0.5)), 1e-15);
    EXPECT_LT(max_abs_diff(s.Sy, pauli_y() * Complex(0.5)), 1e-15);
    EXPECT_LT(max_abs_diff(s.Sz, pauli_z() * Complex(0.5)), 1e-15);
    EXPECT_LT(max_abs_diff(s.Ihat, ComplexMatrix::identity(2) * Complex(0.5)), 1e-15);
}

TEST(Spin, OneMatchesStandardMatrices)
{
    const auto s = spin_matrices(Spin{2});
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    const ComplexMatrix sx(3, {0, r, 0, r, 0, r, 0, r, 0});
    const ComplexMatrix sy(3, {0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0});
    EXPECT_LT(max_abs_diff(s.Sx, sx), 1e-15);
    EXPECT_LT(max_abs_diff(s.Sy, sy), 1e-15);
    EXPECT_LT(max_abs_diff(s.Sz, ComplexMatrix::diagonal({1.0, 0.0, -1.0})), 1e-15);
}

TEST(Spin, CommutationRelationsForAllSpins)
{
    const Complex i(0.0, 1.0);
    for (int twice = 1; twice <= 6; ++twice) {
        const Spin spin{twice};
        const auto s = spin_matrices(spin);
        const double v = spin.value();
        EXPECT_LT(max_abs_diff(s.Sx * s.Sy - s.Sy * s.Sx, i * s.Sz), 1e-13) << "2s = " << twice;
        EXPECT_LT(max_abs_diff(s.Sy * s.Sz - s.Sz * s.Sy, i * s.Sx), 1e-13) << "2s = " << twice;
        EXPECT_LT(max_abs_diff(s.Sz * s.Sx - s.Sx * s.Sz, i * s.Sy), 1e-13) << "2s = " << twice;
        const ComplexMatrix casimir = s.Sx * s.Sx + s.Sy * s.Sy + s.Sz * s.Sz;
        EXPECT_LT(max_abs_diff(casimir, ComplexMatrix::identity(spin.dim()) * Complex(v * (v + 1.0))), 1e-13);
    }
}

TEST(Spin, RejectsOutOfRange)
{
    expect_code(ErrorCode::InvalidSpin, [] { (void)spin_matrices(Spin{0}); });
    expect_code(ErrorCode::InvalidSpin, [] { (void)spin_matrices(Spin{7}); });
    expect_code(ErrorCode::InvalidSpin, [] { (void)Spin::from_double(0.3); });
    EXPECT_EQ(Spin::from_double(1.5), Spin{3});
}

TEST(Spin, ExtendObservableSpectra)
{
    const Spin one{2};
    // α=1, a=0: s·1 has the single eigenvalue 1.
    const auto e = herm_eig(extend_observable(one, 1.0, {0.0, 0.0, 0.0}).matrix);
    for (double v : e.eigenvalues) {
        EXPECT_NEAR(v, 1.0, 1e-14);
    }
    // α=0, a=ẑ: eigenvalues 1, 0, −1.
    const auto z = herm_eig(extend_observable(one, 0.0, {0.0, 0.0, 1.0}).matrix);
    EXPECT_NEAR(z.eigenvalues[0], 1.0, 1e-14);
    EXPECT_NEAR(z.eigenvalues[1], 0.0, 1e-14);
    EXPECT_NEAR(z.eigenvalues[2], -1.0, 1e-14);
    EXPECT_LT(max_abs(extend_observable(one, 0.0, {0.0, 0.0, 0.0}).matrix), 1e-15);
}

TEST(Spin, RotationIsAHomomorphismUpToSign)
{
    Gen gen(181);
    for (int twice = 1; twice <= 6; ++twice) {
        for (int i = 0; i < 30; ++i) {
            const ComplexMatrix a = su2_rotation(gen.unit_vector(), gen.uniform(-3.0, 3.0));
            const ComplexMatrix b = su2_rotation(gen.unit_vector(), gen.uniform(-3.0, 3.0));
            const ComplexMatrix lhs = spin_rotation(Spin{twice}, a * b);
            const ComplexMatrix rhs = spin_rotation(Spin{twice}, a) * spin_rotation(Spin{twice}, b);
            EXPECT_LT(framegate::testing::phase_free_distance(lhs, rhs), 1e-11) << "2s = " << twice;
        }
    }
}
