#pragma once

#include <cstdint>
#include <random>

namespace framegate {

/// Seeded generator with a fully specified output sequence: mt19937_64 for
/// raw bits, 53-bit uniforms and Box-Muller normals, so the same seed yields
/// the same doubles on every conforming platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }
    double uniform();                        ///< [0, 1)
    double uniform(double lo, double hi);
    double normal();                         ///< standard normal
    int index(int n);                        ///< uniform in [0, n)

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Independent stream seed for sub-task `stream` of a run seeded by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace framegate
