#pragma once

#include <cstdint>
#include <vector>

namespace relaysim {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

// Two-sided Wilson score interval for `events` successes out of `trials`.
Interval wilson_interval(std::uint64_t events, std::uint64_t trials, double z = 1.959963984540054);

struct ResultPoint {
    double snr_db = 0.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t trials = 0;        // Bernoulli trials: realizations (outage) or bits (BER)
    std::uint64_t events = 0;        // outages or bit errors
    std::uint64_t realizations = 0;  // channel realizations simulated
    bool low_confidence = false;     // budget ran out before the event target

    // Recomputes estimate and interval from the counts.
    void refresh();
};

}  // namespace relaysim
