#pragma once

namespace framegate {

/// Base tolerances before scaling. Every comparison in the library goes
/// through `scaled()` so one factor can loosen or tighten the whole stack.
namespace tol {
inline constexpr double herm = 1e-12;         ///< Hermiticity, entrywise.
inline constexpr double recon = 1e-10;        ///< Reconstruction checks.
inline constexpr double cluster_gap = 1e-9;   ///< Eigenvalue clustering.
inline constexpr double singular = 1e-12;     ///< |det| and eigenvalue floors.
inline constexpr double psd = 1e-10;          ///< State positivity.
inline constexpr double tomo_residual = 1e-8; ///< Exact-mode tomography fit.
inline constexpr double tomo_clip = 1e-8;     ///< Negativity projected away silently.
inline constexpr double not_physical = 1e-6;  ///< Negativity treated as an error.
inline constexpr double relation = 1e-6;      ///< Relation fit acceptance.
inline constexpr double projective = 1e-9;    ///< |tr(A†B)| = dim comparisons.
}  // namespace tol

/// Process-wide multiplier for all tolerances. Initialised from the
/// FRAMEGATE_TOL_SCALE environment variable (default 1).
double tolerance_scale() noexcept;

/// Overrides the multiplier; intended for startup configuration only.
void set_tolerance_scale(double scale);

inline double scaled(double base) noexcept { return base * tolerance_scale(); }

}  // namespace framegate
