#include "framegate/relsg.hpp"

#include <algorithm>
#include <cmath>

#include "framegate/error.hpp"
#include "framegate/tolerance.hpp"

namespace framegate {

double minkowski_dot(const FourVector& a, const FourVector& b)
{
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

Momentum Momentum::make(const FourVector& p, double mass)
{
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        fail(ErrorCode::InvalidMomentum, "mass must be positive");
    }
    if (!(p[0] > 0.0)) {
        fail(ErrorCode::InvalidMomentum, "energy component must be positive");
    }
    const double shell = minkowski_dot(p, p) - mass * mass;
    if (std::abs(shell) > scaled(1e-9) * std::max(1.0, p[0] * p[0])) {
        fail(ErrorCode::InvalidMomentum, "p·p differs from m² by " + std::to_string(shell));
    }
    return Momentum(p, mass);
}

Acceleration rest_frame_G(const std::array<double, 3>& g) { return Acceleration{{0.0, g[0], g[1], g[2]}}; }

Observable g_operator(const Acceleration& a)
{
    return Observable::make(fourvector_to_hermitian(a.G), "acceleration", "acceleration");
}

namespace {

// Covariant operator G₀ − G⃗·σ and its inverse reading.
ComplexMatrix lowered_operator(const FourVector& g)
{
    return fourvector_to_hermitian({g[0], -g[1], -g[2], -g[3]});
}

FourVector raise_from_operator(const ComplexMatrix& h)
{
    const FourVector low = hermitian_to_fourvector(h);
    return {low[0], -low[1], -low[2], -low[3]};
}

}  // namespace

BoostedAcceleration boost_scenario(const std::array<double, 3>& g_rest, const LorentzMatrix& lambda)
{
    const Acceleration rest = rest_frame_G(g_rest);

    const FourVector direct = lambda.apply(rest.G);

    const ComplexMatrix x = lorentz_to_sl2c(lorentz_inverse(lambda));
    const FourVector spinor = raise_from_operator(x.adjoint() * lowered_operator(rest.G) * x);

    double defect = 0.0;
    double scale = 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
        defect = std::max(defect, std::abs(direct[k] - spinor[k]));
        scale = std::max(scale, std::abs(direct[k]));
    }
    if (defect > scaled(1e-9) * scale) {
        fail(ErrorCode::ConsistencyFailure,
             "four-vector and spinor evaluations differ by " + std::to_string(defect));
    }

    BoostedAcceleration out;
    out.observed = Acceleration{direct};
    out.operator_form = g_operator(out.observed);
    const double spatial = std::sqrt(direct[1] * direct[1] + direct[2] * direct[2] + direct[3] * direct[3]);
    out.eigenvalues = {direct[0] + spatial, direct[0] - spatial};
    out.invariant = minkowski_dot(direct, direct);
    out.consistency_defect = defect;
    return out;
}

ComplexMatrix momentum_metric_weight(const Momentum& p)
{
    return lowered_operator(p.p()) * Complex(1.0 / p.mass());
}

ComplexMatrix momentum_metric(const Momentum& p)
{
    const auto eig = herm_eig(hermitian_part(momentum_metric_weight(p)));
    return hermitian_part(spectral_apply(eig, [](double w) { return Complex(1.0 / std::sqrt(w)); }));
}

}  // namespace framegate
