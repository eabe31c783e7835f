#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relaysim/sim.hpp"

namespace relaysim::cli {

inline constexpr const char* kCsvHeader = "snr_db,estimate,ci_low,ci_high,trials,events";

// Config echo as '#' lines, the fixed header, one row per SNR point. The only
// line that varies between identical runs starts with "# generated:".
void write_csv(std::ostream& os, const ResultCurve& curve, bool with_timestamp = true);

// Full metadata sidecar (JSON).
void write_sidecar(std::ostream& os, const ResultCurve& curve);

// Reads the data rows of a curve CSV; comment lines are skipped.
std::vector<ResultPoint> read_csv(std::istream& is);

}  // namespace relaysim::cli
