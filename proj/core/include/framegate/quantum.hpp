#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "framegate/linalg.hpp"

namespace framegate {

/// Density matrix, or pseudo-state when a metric R is present. With a metric
/// the state is normalised as tr(ρ R⁻²) = 1 and inner products are
/// ⟨φ|R⁻²|ψ⟩.
class State {
  public:
    /// Validates Hermiticity, positivity (≥ −1e-10) and metric normalisation.
    static State make(ComplexMatrix rho, std::optional<ComplexMatrix> metric = std::nullopt);

    [[nodiscard]] int dim() const noexcept { return rho_.dim(); }
    [[nodiscard]] const ComplexMatrix& rho() const noexcept { return rho_; }
    [[nodiscard]] const std::optional<ComplexMatrix>& metric() const noexcept { return metric_; }
    /// R (identity when absent).
    [[nodiscard]] ComplexMatrix metric_or_identity() const;
    /// R⁻² (identity when absent).
    [[nodiscard]] ComplexMatrix metric_weight() const;

  private:
    State(ComplexMatrix rho, std::optional<ComplexMatrix> metric)
        : rho_(std::move(rho)), metric_(std::move(metric))
    {
    }

    ComplexMatrix rho_;
    std::optional<ComplexMatrix> metric_;
};

/// A measurable quantity. The matrix is Hermitian with respect to `metric`
/// (canonically Hermitian when the metric is absent).
struct Observable {
    ComplexMatrix matrix;
    std::string label;
    std::string unit;
    std::optional<ComplexMatrix> metric;

    static Observable make(ComplexMatrix matrix, std::string label = {}, std::string unit = {},
                           std::optional<ComplexMatrix> metric = std::nullopt);
};

/// A description map: states transform as X ρ X† (parity +1) or
/// X̄ ρᵀ X̄† (parity −1). X is stored with canonical global phase.
class Encoding {
  public:
    static Encoding make(const ComplexMatrix& x, int parity);
    static Encoding identity(int dim) { return make(ComplexMatrix::identity(dim), +1); }

    [[nodiscard]] int dim() const noexcept { return x_.dim(); }
    [[nodiscard]] const ComplexMatrix& X() const noexcept { return x_; }
    [[nodiscard]] int parity() const noexcept { return parity_; }
    [[nodiscard]] bool is_unitary() const;

  private:
    Encoding(ComplexMatrix x, int parity) : x_(std::move(x)), parity_(parity) {}

    ComplexMatrix x_;
    int parity_ = +1;
};

/// Raw matrix action of an encoding on a Hermitian matrix (no metric bookkeeping).
ComplexMatrix encode_matrix(const Encoding& phi, const ComplexMatrix& m);

State apply_encoding(const Encoding& phi, const State& rho);
/// X† M X (parity +1) or X† Mᵀ X (parity −1): the system-side observable
/// for a reference-side description M.
Observable apply_encoding_observable(const Encoding& phi, const Observable& m);

struct Outcome {
    double eigenvalue = 0.0;
    double probability = 0.0;
};

/// Outcome distribution, eigenvalues descending, degenerate clusters merged.
std::vector<Outcome> born(const State& rho, const Observable& m);

/// Eigenvalues with multiplicity, descending. For a metric state this is the
/// spectrum of the operator R² M that a device described by M measures.
std::vector<double> outcome_spectrum(const State& rho, const Observable& device);

struct Measurement {
    Observable observable;
    std::vector<Outcome> distribution;
};

struct TomographyOptions {
    double residual_tol = 1e-8;     ///< least-squares residual above this: Inconsistent
    double not_physical_tol = 1e-6; ///< negativity beyond this: NotPhysical
};

struct TomographyResult {
    State state;
    double residual = 0.0;
    double min_eigenvalue = 0.0;  ///< before projection onto the PSD cone
    int rank = 0;
};

/// Linear-inversion tomography over the orthonormal Hermitian basis.
TomographyResult tomography(int dim, const std::vector<Measurement>& data, const TomographyOptions& options = {});

/// Readout of a device on a typed system: the spectrum with multiplicities
/// and the merged outcome distribution.
struct TypedMeasurement {
    Observable device;
    std::vector<double> eigenvalues;
    std::vector<Outcome> distribution;
};

/// Determines both the type R² and the pseudo-state from eigenvalue and
/// probability readouts. The devices must span the Hermitian space.
TomographyResult typed_tomography(int dim, const std::vector<TypedMeasurement>& data,
                                  const TomographyOptions& options = {});

struct RelationFit {
    Encoding encoding;
    double residual = 0.0;  ///< max entrywise deviation over the pairs
};

struct RelationOptions {
    double max_residual = 1e-6;
};

/// Finds the unitary or antiunitary relation ρ'_i = U ρ_i U† (parity +1) or
/// Ū ρ_iᵀ Ū† (parity −1). Supports dimensions 2..4.
RelationFit reconstruct_relation(const std::vector<std::pair<State, State>>& pairs,
                                 const RelationOptions& options = {});

struct OutcomeCount {
    double eigenvalue = 0.0;
    std::uint64_t count = 0;
};

std::vector<OutcomeCount> sample_outcomes(const State& rho, const Observable& m, std::uint64_t n,
                                          std::uint64_t seed);

/// Orthonormal Hermitian basis: identity/√d first, then the generalised
/// Gell-Mann matrices (symmetric, antisymmetric, diagonal), each with
/// tr(B_j B_k) = δ_jk.
std::vector<ComplexMatrix> hermitian_basis(int dim);

/// Real coordinates of a Hermitian matrix in `hermitian_basis`.
std::vector<double> hermitian_coordinates(const ComplexMatrix& h);

struct SpectralProjector {
    double eigenvalue = 0.0;
    ComplexMatrix projector;
};

/// Eigenprojectors of a Hermitian matrix, clusters merged, eigenvalues descending.
std::vector<SpectralProjector> spectral_projectors(const ComplexMatrix& h);

/// Uhlmann fidelity (tr √(√ρ σ √ρ))² of two unit-trace PSD matrices.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Square root of a PSD matrix, clipping tiny negative eigenvalues.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// Pure state |v⟩⟨v| / ⟨v|v⟩.
ComplexMatrix pure_state(std::span<const Complex> v);

/// Pauli matrices σ_x, σ_y, σ_z.
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();

}  // namespace framegate
