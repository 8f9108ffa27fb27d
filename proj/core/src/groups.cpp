#include "framegate/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "framegate/error.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {
namespace {

void require_same_dim(int a, int b)
{
    if (a != b) {
        fail(ErrorCode::DimensionMismatch, "group elements of dimension " + std::to_string(a) + " and "
                                               + std::to_string(b));
    }
}

void require_sign(int s, const char* what)
{
    if (s != 1 && s != -1) {
        fail(ErrorCode::InvalidArgument, std::string(what) + " must be +1 or -1");
    }
}

const std::array<ComplexMatrix, 4>& pauli_four()
{
    static const std::array<ComplexMatrix, 4> basis{ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()};
    return basis;
}

// Right factor of a composite a∘b: b's matrix is conjugated when a is
// antilinear, since a then acts on b's output through a complex conjugate.
ComplexMatrix composite_matrix(const ComplexMatrix& a, int a_sign, const ComplexMatrix& b)
{
    return a * (a_sign == -1 ? b.conj() : b);
}

}  // namespace

// ---------------------------------------------------------------- elements

PUAElement PUAElement::make(const ComplexMatrix& u, int parity)
{
    require_sign(parity, "parity");
    if (u.dim() < 1 || !u.all_finite()) {
        fail(ErrorCode::InvalidArgument, "PUA matrix is empty or non-finite");
    }
    if (!is_unitary(u, 1e-10 * tolerance_scale())) {
        fail(ErrorCode::InvalidArgument, "PUA matrix is not unitary");
    }
    return PUAElement(canonical_phase(u), parity);
}

GLParityElement GLParityElement::make(const ComplexMatrix& y, int kind)
{
    require_sign(kind, "kind");
    if (y.dim() < 1 || !y.all_finite()) {
        fail(ErrorCode::InvalidArgument, "GL-parity matrix is empty or non-finite");
    }
    if (std::abs(det(y)) <= scaled(tol::singular)) {
        fail(ErrorCode::Singular, "GL-parity matrix has |det| <= 1e-12");
    }
    return GLParityElement(canonical_phase(y), kind);
}

PUAElement pua_compose(const PUAElement& a, const PUAElement& b)
{
    require_same_dim(a.dim(), b.dim());
    return PUAElement::make(composite_matrix(a.U(), a.parity(), b.U()), a.parity() * b.parity());
}

PUAElement pua_inverse(const PUAElement& a)
{
    // (U,+1)⁻¹ = (U†,+1); (U,−1)⁻¹ = (Uᵀ,−1)
    return PUAElement::make(a.parity() == 1 ? a.U().adjoint() : a.U().transpose(), a.parity());
}

GLParityElement glparity_compose(const GLParityElement& a, const GLParityElement& b)
{
    require_same_dim(a.dim(), b.dim());
    // T_Y⁺T_Z⁺ = T_{YZ}⁺, T_Y⁻T_Z⁻ = T_{YZ̄}⁺, T_Y⁻T_Z⁺ = T_{YZ̄}⁻, T_Y⁺T_Z⁻ = T_{YZ}⁻
    return GLParityElement::make(composite_matrix(a.Y(), a.kind(), b.Y()), a.kind() * b.kind());
}

GLParityElement glparity_inverse(const GLParityElement& a)
{
    const ComplexMatrix inv = inverse(a.Y());
    return GLParityElement::make(a.kind() == 1 ? inv : inv.conj(), a.kind());
}

ComplexMatrix act(const PUAElement& g, const ComplexMatrix& m)
{
    require_same_dim(g.dim(), m.dim());
    return g.U() * (g.parity() == 1 ? m : m.transpose()) * g.U().adjoint();
}

ComplexMatrix act(const GLParityElement& g, const ComplexMatrix& m)
{
    require_same_dim(g.dim(), m.dim());
    return g.Y() * (g.kind() == 1 ? m : m.transpose()) * g.Y().adjoint();
}

ComplexMatrix act_dual(const GLParityElement& g, const ComplexMatrix& m)
{
    require_same_dim(g.dim(), m.dim());
    const ComplexMatrix inv = inverse(g.Y());
    return inv.adjoint() * (g.kind() == 1 ? m : m.transpose()) * inv;
}

SystemDescription act_on_descriptor(const GLParityElement& g, const SystemDescription& s)
{
    require_same_dim(g.dim(), s.X.dim());
    require_sign(s.parity, "parity");
    const ComplexMatrix& w = g.Y();
    if (g.kind() == 1) {
        return s.parity == 1 ? SystemDescription{w * s.X, 1} : SystemDescription{w.conj() * s.X, -1};
    }
    return s.parity == 1 ? SystemDescription{w.conj() * s.X, -1} : SystemDescription{w * s.X, 1};
}

SystemDescription correcting_transformation(const ComplexMatrix& x_a, int parity_a, const ComplexMatrix& y,
                                            bool same_parity_frames)
{
    require_sign(parity_a, "parity");
    require_same_dim(x_a.dim(), y.dim());
    const ComplexMatrix y_inv = inverse(y);
    if (same_parity_frames) {
        return parity_a == 1 ? SystemDescription{y_inv * x_a, 1} : SystemDescription{y_inv.conj() * x_a, -1};
    }
    return parity_a == 1 ? SystemDescription{y_inv.conj() * x_a, -1} : SystemDescription{y_inv * x_a, 1};
}

GLParityElement as_glparity(const Encoding& phi)
{
    return GLParityElement::make(phi.parity() == 1 ? phi.X() : phi.X().conj(), phi.parity());
}

Encoding as_encoding(const GLParityElement& g)
{
    return Encoding::make(g.kind() == 1 ? g.Y() : g.Y().conj(), g.kind());
}

PUAElement as_pua(const Encoding& phi) { return as_pua(as_glparity(phi)); }

PUAElement as_pua(const GLParityElement& g) { return PUAElement::make(g.Y(), g.kind()); }

GLParityElement as_glparity(const PUAElement& g) { return GLParityElement::make(g.U(), g.parity()); }

bool projectively_equal(const PUAElement& a, const PUAElement& b, double tolerance)
{
    return a.dim() == b.dim() && a.parity() == b.parity() && projective_defect(a.U(), b.U()) <= tolerance;
}

// ---------------------------------------------------------------- scaling

ComplexMatrix unimodular_canonical(const ComplexMatrix& z)
{
    const int n = z.dim();
    for (int r = 0; r < n; ++r) {
        const Complex entry = z(r, 0);
        if (std::abs(entry) <= 1e-12) {
            continue;
        }
        const double step = 2.0 * std::numbers::pi / n;
        const double arg = std::arg(entry);
        const double shift = -step * std::ceil((arg - step / 2.0) / step);
        if (shift == 0.0) {
            return z;
        }
        return z * std::polar(1.0, shift);
    }
    return z;
}

ScalingSplit split_scaling(const ComplexMatrix& y)
{
    const Complex d = det(y);
    if (std::abs(d) <= scaled(tol::singular)) {
        fail(ErrorCode::Singular, "split_scaling needs an invertible matrix");
    }
    const int n = y.dim();
    ScalingSplit out;
    out.lambda = std::pow(std::abs(d), 2.0 / n);
    const Complex root = std::pow(d, 1.0 / n);
    out.Z = unimodular_canonical(y * (1.0 / root));
    return out;
}

// ---------------------------------------------------------------- four-vectors

FourVector hermitian_to_fourvector(const ComplexMatrix& h)
{
    if (h.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "four-vectors correspond to 2x2 Hermitian matrices");
    }
    return {0.5 * (h(0, 0).real() + h(1, 1).real()), h(1, 0).real(), h(1, 0).imag(),
            0.5 * (h(0, 0).real() - h(1, 1).real())};
}

ComplexMatrix fourvector_to_hermitian(const FourVector& x)
{
    return ComplexMatrix(2, {Complex(x[0] + x[3]), Complex(x[1], -x[2]), Complex(x[1], x[2]), Complex(x[0] - x[3])});
}

FourVector LorentzMatrix::apply(const FourVector& x) const
{
    FourVector out{};
    for (int r = 0; r < 4; ++r) {
        double sum = 0.0;
        for (int c = 0; c < 4; ++c) {
            sum += m(r, c) * x[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = sum;
    }
    return out;
}

const RealMatrix& minkowski_metric()
{
    static const RealMatrix eta(4, 4, {1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1});
    return eta;
}

double lorentz_defect(const RealMatrix& l)
{
    const RealMatrix& eta = minkowski_metric();
    return max_abs_diff(l.transpose() * eta * l, eta);
}

bool is_proper_orthochronous(const RealMatrix& l, double tolerance)
{
    if (l.rows() != 4 || l.cols() != 4) {
        return false;
    }
    return lorentz_defect(l) <= tolerance && std::abs(det(l) - 1.0) <= tolerance && l(0, 0) >= 1.0 - tolerance;
}

LorentzMatrix lorentz_inverse(const LorentzMatrix& l)
{
    const RealMatrix& eta = minkowski_metric();
    return LorentzMatrix{eta * l.m.transpose() * eta};
}

LorentzMatrix lorentz_compose(const LorentzMatrix& a, const LorentzMatrix& b) { return LorentzMatrix{a.m * b.m}; }

LorentzMatrix boost(const std::array<double, 3>& rapidity)
{
    const double phi = std::sqrt(rapidity[0] * rapidity[0] + rapidity[1] * rapidity[1] + rapidity[2] * rapidity[2]);
    LorentzMatrix out;
    if (phi == 0.0) {
        return out;
    }
    const double gamma = std::cosh(phi);
    const double sh = std::sinh(phi);
    std::array<double, 3> u{};
    for (int i = 0; i < 3; ++i) {
        u[static_cast<std::size_t>(i)] = sh * rapidity[static_cast<std::size_t>(i)] / phi;
    }
    out.m(0, 0) = gamma;
    for (int i = 0; i < 3; ++i) {
        out.m(0, i + 1) = u[static_cast<std::size_t>(i)];
        out.m(i + 1, 0) = u[static_cast<std::size_t>(i)];
        for (int j = 0; j < 3; ++j) {
            out.m(i + 1, j + 1) = (i == j ? 1.0 : 0.0) + u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] / (gamma + 1.0);
        }
    }
    return out;
}

LorentzMatrix spatial_rotation(const RealMatrix& rot3)
{
    LorentzMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.m(i + 1, j + 1) = rot3(i, j);
        }
    }
    return out;
}

LorentzMatrix sl2c_to_lorentz(const ComplexMatrix& x)
{
    if (x.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "sl2c_to_lorentz needs a 2x2 matrix");
    }
    if (std::abs(det(x) - 1.0) >= scaled(tol::recon)) {
        fail(ErrorCode::NotUnimodular, "|det X - 1| must be below 1e-10");
    }
    const auto& s = pauli_four();
    LorentzMatrix out;
    const ComplexMatrix xd = x.adjoint();
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            const ComplexMatrix prod = s[static_cast<std::size_t>(mu)] * x * s[static_cast<std::size_t>(nu)] * xd;
            out.m(mu, nu) = 0.5 * prod.trace().real();
        }
    }
    return out;
}

ComplexMatrix lorentz_to_sl2c(const LorentzMatrix& l)
{
    if (!is_proper_orthochronous(l.m, 1e-9 * tolerance_scale() * std::max(1.0, l(0, 0) * l(0, 0)))) {
        fail(ErrorCode::NotProperOrthochronous, "matrix is not a proper orthochronous Lorentz transformation");
    }
    // Boost from the first column, Λ = B·R with R a spatial rotation.
    const double gamma = l(0, 0);
    const std::array<double, 3> u{l(1, 0), l(2, 0), l(3, 0)};
    LorentzMatrix b;
    b.m(0, 0) = gamma;
    for (int i = 0; i < 3; ++i) {
        b.m(0, i + 1) = u[static_cast<std::size_t>(i)];
        b.m(i + 1, 0) = u[static_cast<std::size_t>(i)];
        for (int j = 0; j < 3; ++j) {
            b.m(i + 1, j + 1) = (i == j ? 1.0 : 0.0) + u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] / (gamma + 1.0);
        }
    }
    const LorentzMatrix r = lorentz_compose(lorentz_inverse(b), l);
    RealMatrix rot3(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            rot3(i, j) = r(i + 1, j + 1);
        }
    }
    // exp(φ/2 n·σ) = cosh(φ/2) + sinh(φ/2) n·σ with cosh(φ/2) = √((γ+1)/2)
    const double c = std::sqrt((gamma + 1.0) / 2.0);
    const FourVector half{c, u[0] / (2.0 * c), u[1] / (2.0 * c), u[2] / (2.0 * c)};
    const ComplexMatrix x_boost = fourvector_to_hermitian(half);
    return unimodular_canonical(x_boost * su2_from_so3(rot3));
}

RealMatrix fourvector_map(const GLParityElement& g)
{
    if (g.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "four-vector maps need a qubit element");
    }
    const auto& s = pauli_four();
    RealMatrix out(4, 4);
    for (int nu = 0; nu < 4; ++nu) {
        const ComplexMatrix image = act(g, s[static_cast<std::size_t>(nu)]);
        for (int mu = 0; mu < 4; ++mu) {
            out(mu, nu) = 0.5 * hs_inner(s[static_cast<std::size_t>(mu)], image).real();
        }
    }
    return out;
}

ScaledLorentz decompose_scaled_lorentz(const GLParityElement& g)
{
    if (g.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "scaled Lorentz decomposition needs a qubit element");
    }
    const ScalingSplit split = split_scaling(g.Y());
    ScaledLorentz out;
    out.lambda = split.lambda;
    out.lorentz = sl2c_to_lorentz(split.Z).m;
    if (g.kind() == -1) {
        // Transposition flips the y component of a four-vector.
        const RealMatrix reflect(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1});
        out.lorentz = out.lorentz * reflect;
    }
    return out;
}

// ---------------------------------------------------------------- rotations

RealMatrix bloch_map(const PUAElement& e)
{
    if (e.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "bloch_map needs a qubit element");
    }
    const auto& s = pauli_four();
    RealMatrix out(3, 3);
    for (int k = 0; k < 3; ++k) {
        const ComplexMatrix image = act(e, s[static_cast<std::size_t>(k + 1)]);
        for (int j = 0; j < 3; ++j) {
            out(j, k) = 0.5 * hs_inner(s[static_cast<std::size_t>(j + 1)], image).real();
        }
    }
    return out;
}

ComplexMatrix su2_from_so3(const RealMatrix& r)
{
    if (r.rows() != 3 || r.cols() != 3) {
        fail(ErrorCode::NotRotation, "expected a 3x3 matrix");
    }
    const double t = scaled(tol::recon);
    if (max_abs_diff(r.transpose() * r, RealMatrix::identity(3)) > t || std::abs(det(r) - 1.0) > t) {
        fail(ErrorCode::NotRotation, "matrix is not in SO(3)");
    }
    // Shepperd's method: take the largest of the four quaternion diagonals.
    const double tr = r(0, 0) + r(1, 1) + r(2, 2);
    double q0 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
        q0 = 0.5 * std::sqrt(1.0 + tr);
        q1 = (r(2, 1) - r(1, 2)) / (4.0 * q0);
        q2 = (r(0, 2) - r(2, 0)) / (4.0 * q0);
        q3 = (r(1, 0) - r(0, 1)) / (4.0 * q0);
    }
    else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
        q1 = 0.5 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
        q0 = (r(2, 1) - r(1, 2)) / (4.0 * q1);
        q2 = (r(0, 1) + r(1, 0)) / (4.0 * q1);
        q3 = (r(0, 2) + r(2, 0)) / (4.0 * q1);
    }
    else if (r(1, 1) >= r(2, 2)) {
        q2 = 0.5 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
        q0 = (r(0, 2) - r(2, 0)) / (4.0 * q2);
        q1 = (r(0, 1) + r(1, 0)) / (4.0 * q2);
        q3 = (r(1, 2) + r(2, 1)) / (4.0 * q2);
    }
    else {
        q3 = 0.5 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
        q0 = (r(1, 0) - r(0, 1)) / (4.0 * q3);
        q1 = (r(0, 2) + r(2, 0)) / (4.0 * q3);
        q2 = (r(1, 2) + r(2, 1)) / (4.0 * q3);
    }
    const double norm = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
    q0 /= norm;
    q1 /= norm;
    q2 /= norm;
    q3 /= norm;
    // q0 − i q·σ
    const ComplexMatrix u(2, {Complex(q0, -q3), Complex(-q2, -q1), Complex(q2, -q1), Complex(q0, q3)});
    return unimodular_canonical(u);
}

RealMatrix rotation_matrix(const std::array<double, 3>& axis, double angle)
{
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n == 0.0) {
        fail(ErrorCode::NotUnit, "rotation axis is zero");
    }
    const double x = axis[0] / n;
    const double y = axis[1] / n;
    const double z = axis[2] / n;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double k = 1.0 - c;
    return RealMatrix(3, 3,
                      {c + x * x * k, x * y * k - z * s, x * z * k + y * s,  //
                       y * x * k + z * s, c + y * y * k, y * z * k - x * s,  //
                       z * x * k - y * s, z * y * k + x * s, c + z * z * k});
}

ComplexMatrix su2_rotation(const std::array<double, 3>& axis, double angle)
{
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n == 0.0) {
        fail(ErrorCode::NotUnit, "rotation axis is zero");
    }
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const double x = axis[0] / n;
    const double y = axis[1] / n;
    const double z = axis[2] / n;
    return ComplexMatrix(2, {Complex(c, -s * z), Complex(-s * y, -s * x), Complex(s * y, -s * x), Complex(c, s * z)});
}

// ---------------------------------------------------------------- spin

Spin Spin::from_double(double s)
{
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (std::abs(twice - rounded) > 1e-12 || rounded < 1.0 || rounded > 6.0) {
        fail(ErrorCode::InvalidSpin, "spin must be a half-integer in [1/2, 3]");
    }
    return Spin{static_cast<int>(rounded)};
}

SpinMatrices spin_matrices(Spin s)
{
    if (s.twice < 1 || s.twice > 6) {
        fail(ErrorCode::InvalidSpin, "spin must be a half-integer in [1/2, 3]");
    }
    const int d = s.dim();
    SpinMatrices out{ComplexMatrix(d), ComplexMatrix(d), ComplexMatrix(d), ComplexMatrix(d)};
    for (int k = 0; k < d; ++k) {
        const int twice_m = s.twice - 2 * k;
        out.Sz(k, k) = twice_m / 2.0;
        out.Ihat(k, k) = s.value();
        if (k == 0) {
            continue;
        }
        // ⟨m+1|S+|m⟩ = √(s(s+1) − m(m+1)), integer arithmetic in units of 1/4
        const int quarter = s.twice * (s.twice + 2) - twice_m * (twice_m + 2);
        const double half_ladder = std::sqrt(static_cast<double>(quarter)) / 4.0;
        out.Sx(k - 1, k) = half_ladder;
        out.Sx(k, k - 1) = half_ladder;
        out.Sy(k - 1, k) = Complex(0.0, -half_ladder);
        out.Sy(k, k - 1) = Complex(0.0, half_ladder);
    }
    return out;
}

ComplexMatrix spin_along(Spin s, const std::array<double, 3>& n)
{
    const auto m = spin_matrices(s);
    return n[0] * m.Sx + n[1] * m.Sy + n[2] * m.Sz;
}

Observable extend_observable(Spin s, double alpha, const std::array<double, 3>& a)
{
    const auto m = spin_matrices(s);
    return Observable::make(alpha * m.Ihat + a[0] * m.Sx + a[1] * m.Sy + a[2] * m.Sz, "linear extension");
}

ComplexMatrix spin_rotation(Spin s, const ComplexMatrix& su2)
{
    if (su2.dim() != 2) {
        fail(ErrorCode::DimensionMismatch, "spin_rotation needs a 2x2 matrix");
    }
    const ComplexMatrix u = su2 * (1.0 / std::sqrt(det(su2)));
    const double q0 = u(0, 0).real();
    const double q1 = -u(0, 1).imag();
    const double q2 = -u(0, 1).real();
    const double q3 = -u(0, 0).imag();
    const double vnorm = std::sqrt(q1 * q1 + q2 * q2 + q3 * q3);
    const int d = s.dim();
    if (vnorm == 0.0) {
        return q0 >= 0.0 || s.twice % 2 == 0 ? ComplexMatrix::identity(d) : -ComplexMatrix::identity(d);
    }
    const double theta = 2.0 * std::atan2(vnorm, q0);
    const ComplexMatrix generator = spin_along(s, {q1 / vnorm, q2 / vnorm, q3 / vnorm});
    const auto eig = herm_eig(hermitian_part(generator));
    return spectral_apply(eig, [theta](double lam) { return std::polar(1.0, -theta * lam); });
}

}  // namespace framegate
