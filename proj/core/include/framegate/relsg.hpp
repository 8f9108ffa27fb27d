#pragma once

#include <array>

#include "framegate/groups.hpp"
#include "framegate/quantum.hpp"

namespace framegate {

/// a₀b₀ − a⃗·b⃗
double minkowski_dot(const FourVector& a, const FourVector& b);

/// On-shell four-momentum, c = 1.
class Momentum {
  public:
    /// InvalidMomentum unless p·p = m² within 1e-9 and p₀ > 0.
    static Momentum make(const FourVector& p, double mass);
    static Momentum at_rest(double mass) { return make({mass, 0.0, 0.0, 0.0}, mass); }

    [[nodiscard]] const FourVector& p() const noexcept { return p_; }
    [[nodiscard]] double mass() const noexcept { return mass_; }

  private:
    Momentum(const FourVector& p, double mass) : p_(p), mass_(mass) {}

    FourVector p_{};
    double mass_ = 1.0;
};

/// Four-acceleration seen by some observer.
struct Acceleration {
    FourVector G{};
};

/// (0, g⃗): the form of the acceleration in the particle's rest frame.
Acceleration rest_frame_G(const std::array<double, 3>& g);

/// G₀ + G⃗·σ, eigenvalues G₀ ± |G⃗|.
Observable g_operator(const Acceleration& a);

struct BoostedAcceleration {
    Acceleration observed;
    Observable operator_form;
    std::array<double, 2> eigenvalues{};  ///< descending
    double invariant = 0.0;               ///< product of the eigenvalues, G·G
    double consistency_defect = 0.0;      ///< max deviation of the two evaluation paths
};

/// Rest-frame acceleration as seen by an observer related by `lambda`,
/// computed both as Λ·G and as X†ĜX on the covariant operator with
/// X = lorentz_to_sl2c(Λ⁻¹). ConsistencyFailure if they differ by > 1e-9.
BoostedAcceleration boost_scenario(const std::array<double, 3>& g_rest, const LorentzMatrix& lambda);

/// R⁻² = (p₀ − p⃗·σ)/m, the inner-product weight on the qubit of momentum p.
ComplexMatrix momentum_metric_weight(const Momentum& p);
/// The type R itself: the inverse square root of the weight.
ComplexMatrix momentum_metric(const Momentum& p);

}  // namespace framegate
