#pragma once

// Generators and independent oracles shared by the unit tests. The oracles
// deliberately avoid the library's own kernels (no herm_eig, no polar) so a
// frozen value checked against them is not checked against itself.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "framegate/groups.hpp"
#include "framegate/linalg.hpp"
#include "framegate/quantum.hpp"
#include "framegate/random.hpp"

namespace framegate::testing {

/// Seeded case generator; every property test draws from one of these so a
/// failing case can be replayed from (seed, index).
class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    Rng& rng() { return rng_; }
    double uniform(double lo, double hi) { return rng_.uniform(lo, hi); }
    int index(int n) { return rng_.index(n); }
    int parity() { return rng_.index(2) == 0 ? 1 : -1; }

    std::array<double, 3> unit_vector()
    {
        std::array<double, 3> v{rng_.normal(), rng_.normal(), rng_.normal()};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (double& x : v) {
            x /= n;
        }
        return v;
    }

    ComplexMatrix hermitian(int dim)
    {
        ComplexMatrix g = ginibre(dim, rng_);
        return (g + g.adjoint()) * Complex(0.5);
    }

    ComplexMatrix unitary(int dim) { return haar_unitary(dim, rng_); }
    ComplexMatrix density(int dim, int rank = 0) { return random_density(dim, rng_, rank); }
    ComplexMatrix positive_definite(int dim) { return random_positive_definite(dim, rng_); }

    /// Invertible matrix with singular values in [e^-spread, e^spread].
    ComplexMatrix bounded_invertible(int dim, double spread)
    {
        std::vector<double> d(static_cast<std::size_t>(dim));
        for (double& x : d) {
            x = std::exp(rng_.uniform(-spread, spread));
        }
        return unitary(dim) * ComplexMatrix::diagonal(d) * unitary(dim);
    }

    /// Unimodular 2×2 matrix with bounded condition number.
    ComplexMatrix sl2c(double spread)
    {
        const ComplexMatrix y = bounded_invertible(2, spread);
        return y * (Complex(1.0) / std::sqrt(det(y)));
    }

  private:
    Rng rng_;
};

/// Λ_{μν} = ½ tr(σ_μ X σ_ν X†) with σ = (1, σx, σy, σz), evaluated entry by
/// entry from the trace formula.
inline RealMatrix trace_formula_lorentz(const ComplexMatrix& x)
{
    const std::array<ComplexMatrix, 4> sigma{ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()};
    RealMatrix l(4, 4);
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            l(mu, nu) = 0.5 * (sigma[static_cast<std::size_t>(mu)] * x * sigma[static_cast<std::size_t>(nu)] * x.adjoint())
                                  .trace()
                                  .real();
        }
    }
    return l;
}

/// Real roots of x³ + a x² + b x + c with three real roots, descending
/// (trigonometric Cardano).
inline std::array<double, 3> cubic_roots(double a, double b, double c)
{
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    std::array<double, 3> r{};
    if (std::abs(p) < 1e-300) {
        r.fill(std::cbrt(-q) - a / 3.0);
        return r;
    }
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
    for (int k = 0; k < 3; ++k) {
        r[static_cast<std::size_t>(k)] = m * std::cos(theta - 2.0 * M_PI * k / 3.0) - a / 3.0;
    }
    std::sort(r.begin(), r.end(), std::greater<>());
    return r;
}

/// Characteristic polynomial coefficients (a, b, c) of a 3×3 Hermitian matrix.
inline std::array<double, 3> charpoly3(const ComplexMatrix& m)
{
    const Complex tr = m.trace();
    const ComplexMatrix m2 = m * m;
    const Complex minors = (tr * tr - m2.trace()) * 0.5;
    const Complex d = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                      + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    return {-tr.real(), minors.real(), -d.real()};
}

/// Eigenvalues of a 2×2 Hermitian matrix from the closed form, descending.
inline std::array<double, 2> eig2(const ComplexMatrix& m)
{
    const double mean = 0.5 * (m(0, 0).real() + m(1, 1).real());
    const double half = 0.5 * (m(0, 0).real() - m(1, 1).real());
    const double r = std::sqrt(half * half + std::norm(m(0, 1)));
    return {mean + r, mean - r};
}

/// Bloch vector of a qubit density matrix.
inline std::array<double, 3> bloch(const ComplexMatrix& rho)
{
    return {(rho * pauli_x()).trace().real(), (rho * pauli_y()).trace().real(), (rho * pauli_z()).trace().real()};
}

/// Phase-insensitive equality of two matrices of the same shape.
inline double phase_free_distance(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const Complex overlap = hs_inner(a, b);
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    return max_abs_diff(a * phase, b);
}

}  // namespace framegate::testing
