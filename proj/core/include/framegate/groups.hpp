#pragma once

#include <array>
#include <utility>

#include "framegate/linalg.hpp"
#include "framegate/quantum.hpp"

namespace framegate {

/// Element of the projective unitary-antiunitary group: ρ ↦ UρU† (parity
/// +1) or ρ ↦ UρᵀU† (parity −1). U carries canonical phase.
class PUAElement {
  public:
    static PUAElement make(const ComplexMatrix& u, int parity);
    static PUAElement identity(int dim) { return make(ComplexMatrix::identity(dim), +1); }

    [[nodiscard]] int dim() const noexcept { return u_.dim(); }
    [[nodiscard]] const ComplexMatrix& U() const noexcept { return u_; }
    [[nodiscard]] int parity() const noexcept { return parity_; }

  private:
    PUAElement(ComplexMatrix u, int parity) : u_(std::move(u)), parity_(parity) {}

    ComplexMatrix u_;
    int parity_ = +1;
};

/// Element T_Y^± of the GL-parity group. On Hermitian matrices it acts as
/// M ↦ Y M Y† (kind +1) or M ↦ Y Mᵀ Y† (kind −1); on system descriptors
/// (X, parity) it acts through the correcting table.
class GLParityElement {
  public:
    static GLParityElement make(const ComplexMatrix& y, int kind);
    static GLParityElement identity(int dim) { return make(ComplexMatrix::identity(dim), +1); }

    [[nodiscard]] int dim() const noexcept { return y_.dim(); }
    [[nodiscard]] const ComplexMatrix& Y() const noexcept { return y_; }
    [[nodiscard]] int kind() const noexcept { return kind_; }

  private:
    GLParityElement(ComplexMatrix y, int kind) : y_(std::move(y)), kind_(kind) {}

    ComplexMatrix y_;
    int kind_ = +1;
};

PUAElement pua_compose(const PUAElement& a, const PUAElement& b);
PUAElement pua_inverse(const PUAElement& a);
GLParityElement glparity_compose(const GLParityElement& a, const GLParityElement& b);
GLParityElement glparity_inverse(const GLParityElement& a);

/// Conjugation action on a Hermitian matrix (states, or observables in the
/// convention where they transform like states).
ComplexMatrix act(const PUAElement& g, const ComplexMatrix& m);
ComplexMatrix act(const GLParityElement& g, const ComplexMatrix& m);
/// Dual action, preserving tr(ρ M) when ρ transforms by `act`:
/// M ↦ Y⁻† M Y⁻¹ (kind +1) or Y⁻† Mᵀ Y⁻¹ (kind −1).
ComplexMatrix act_dual(const GLParityElement& g, const ComplexMatrix& m);

/// A concrete system relative to a reference: observables satisfy
/// M(S) = X† M(S₀) X (parity +1) or X† M(S₀)ᵀ X (parity −1).
struct SystemDescription {
    ComplexMatrix X;
    int parity = +1;
};

/// Action of T_W^± on system descriptors:
/// T_W⁺: (X,+1) ↦ (WX,+1), (X,−1) ↦ (W̄X,−1);
/// T_W⁻: (X,+1) ↦ (W̄X,−1), (X,−1) ↦ (WX,+1).
SystemDescription act_on_descriptor(const GLParityElement& g, const SystemDescription& s);

/// Rewrites Alice's descriptor into Bob's when Bob's reference observables
/// are Y† M Y (same parity) or Y† Mᵀ Y (opposite parity) of Alice's.
SystemDescription correcting_transformation(const ComplexMatrix& x_a, int parity_a, const ComplexMatrix& y,
                                            bool same_parity_frames);

/// The group element whose `act` coincides with `encode_matrix`.
GLParityElement as_glparity(const Encoding& phi);
Encoding as_encoding(const GLParityElement& g);
/// Requires a unitary encoding.
PUAElement as_pua(const Encoding& phi);
PUAElement as_pua(const GLParityElement& g);
GLParityElement as_glparity(const PUAElement& g);

bool projectively_equal(const PUAElement& a, const PUAElement& b, double tolerance);

struct ScalingSplit {
    double lambda = 1.0;  ///< |det Y|^{2/N}
    ComplexMatrix Z;      ///< det Z = 1; Y M Y† = λ Z M Z†
};

ScalingSplit split_scaling(const ComplexMatrix& y);

/// Among the N-th-root-of-unity multiples of a unimodular matrix, the one
/// whose first non-negligible first-column entry has argument in (−π/N, π/N].
ComplexMatrix unimodular_canonical(const ComplexMatrix& z);

using FourVector = std::array<double, 4>;

FourVector hermitian_to_fourvector(const ComplexMatrix& h);
ComplexMatrix fourvector_to_hermitian(const FourVector& x);

/// 4×4 real matrix in the (t, x, y, z) basis.
struct LorentzMatrix {
    RealMatrix m = RealMatrix::identity(4);

    double operator()(int r, int c) const { return m(r, c); }
    FourVector apply(const FourVector& x) const;
};

const RealMatrix& minkowski_metric();
/// max |ΛᵀηΛ − η|
double lorentz_defect(const RealMatrix& l);
bool is_proper_orthochronous(const RealMatrix& l, double tolerance);
LorentzMatrix lorentz_inverse(const LorentzMatrix& l);
LorentzMatrix lorentz_compose(const LorentzMatrix& a, const LorentzMatrix& b);

/// Pure boost with rapidity |rapidity| along its direction.
LorentzMatrix boost(const std::array<double, 3>& rapidity);
/// Spatial rotation embedded in the Lorentz group.
LorentzMatrix spatial_rotation(const RealMatrix& rot3);

LorentzMatrix sl2c_to_lorentz(const ComplexMatrix& x);
ComplexMatrix lorentz_to_sl2c(const LorentzMatrix& l);

/// Real 4×4 matrix of a dim-2 GL-parity element acting on four-vectors.
RealMatrix fourvector_map(const GLParityElement& g);

struct ScaledLorentz {
    double lambda = 1.0;
    /// Orthochronous part, including the spatial reflection y ↦ −y for kind −1.
    RealMatrix lorentz = RealMatrix::identity(4);
};

ScaledLorentz decompose_scaled_lorentz(const GLParityElement& g);

/// 3×3 real matrix of a qubit PUA element acting on Bloch vectors.
RealMatrix bloch_map(const PUAElement& e);
ComplexMatrix su2_from_so3(const RealMatrix& rot);

/// Rotation by `angle` about the unit vector `axis`.
RealMatrix rotation_matrix(const std::array<double, 3>& axis, double angle);
/// exp(−i angle n·σ/2)
ComplexMatrix su2_rotation(const std::array<double, 3>& axis, double angle);

/// Half-integer spin stored as 2s.
struct Spin {
    int twice = 1;

    static Spin from_double(double s);
    [[nodiscard]] double value() const noexcept { return twice / 2.0; }
    [[nodiscard]] int dim() const noexcept { return twice + 1; }

    friend bool operator==(Spin, Spin) = default;
};

struct SpinMatrices {
    ComplexMatrix Sx;
    ComplexMatrix Sy;
    ComplexMatrix Sz;
    ComplexMatrix Ihat;  ///< s·identity
};

/// Ladder-operator construction with the Condon-Shortley phase, basis
/// ordered m = s, s−1, …, −s. Spins 1/2 through 3.
SpinMatrices spin_matrices(Spin s);
/// n_x Sx + n_y Sy + n_z Sz
ComplexMatrix spin_along(Spin s, const std::array<double, 3>& n);
Observable extend_observable(Spin s, double alpha, const std::array<double, 3>& a);

/// Spin-s representation exp(−iθ n·S) of an SU(2) matrix (phase of a
/// general unitary is removed first, so the result is projective there).
ComplexMatrix spin_rotation(Spin s, const ComplexMatrix& su2);

}  // namespace framegate
