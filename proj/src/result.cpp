#include "relaysim/result.hpp"

#include <algorithm>
#include <cmath>

namespace relaysim {

Interval wilson_interval(std::uint64_t events, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(events) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // Clamp so that low <= p <= high survives rounding at p = 0 or 1.
    return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

void ResultPoint::refresh() {
    estimate = trials ? static_cast<double>(events) / static_cast<double>(trials) : 0.0;
    const Interval ci = wilson_interval(events, trials);
    ci_low = ci.low;
    ci_high = ci.high;
}

}  // namespace relaysim
