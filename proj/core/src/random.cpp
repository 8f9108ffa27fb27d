#include "framegate/random.hpp"

#include <cmath>
#include <numbers>

namespace framegate {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

int Rng::index(int n)
{
    // Multiply-shift keeps the sequence portable; the bias is below 2^-32
    // for the small n used here.
    return static_cast<int>((engine_() >> 32) * static_cast<std::uint64_t>(n) >> 32);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    // splitmix64 finaliser over a golden-ratio stride.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace framegate
