#include "framegate/tolerance.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "framegate/error.hpp"

namespace framegate {
namespace {

double scale_from_env() noexcept
{
    const char* raw = std::getenv("FRAMEGATE_TOL_SCALE");
    if (raw == nullptr) {
        return 1.0;
    }
    double value = 0.0;
    const char* end = raw + std::strlen(raw);
    auto [ptr, ec] = std::from_chars(raw, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value) || value <= 0.0) {
        return 1.0;
    }
    return value;
}

std::atomic<double>& scale_slot() noexcept
{
    static std::atomic<double> slot{scale_from_env()};
    return slot;
}

}  // namespace

double tolerance_scale() noexcept { return scale_slot().load(std::memory_order_relaxed); }

void set_tolerance_scale(double scale)
{
    if (!std::isfinite(scale) || scale <= 0.0) {
        fail(ErrorCode::InvalidArgument, "tolerance scale must be positive and finite");
    }
    scale_slot().store(scale, std::memory_order_relaxed);
}

}  // namespace framegate
