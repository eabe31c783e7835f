#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "relaysim/result.hpp"
#include "relaysim/schedule.hpp"

namespace relaysim {

// Piecewise-linear diversity-multiplexing tradeoff curve, clamped at zero
// beyond max_r.
struct DmtCurve {
    Protocol protocol = Protocol::Direct;
    std::size_t antennas = 1;
    std::size_t frame_length = 1;
    std::size_t sources = 2;
    std::vector<std::pair<double, double>> breakpoints;  // (r, d), r ascending
    double max_r = 0.0;
    double max_d = 0.0;

    double at(double r) const;
};

// Achievable diversity gain per source at multiplexing gain r (0 beyond the
// maximum multiplexing gain). `sources` only matters for MSourceSuperposition.
double theoretical_dmt(Protocol protocol, std::size_t antennas, std::size_t frame_length, std::size_t sources,
                       double r);

DmtCurve dmt_curve(Protocol protocol, std::size_t antennas, std::size_t frame_length, std::size_t sources = 2);

// Multiplexing gains in [0, max(max_r)) where the curves meet. Ranges where
// they coincide are reported by their endpoints.
std::vector<double> crossover_points(const DmtCurve& a, const DmtCurve& b);

struct DiversityFit {
    double slope = 0.0;
    double std_error = 0.0;
    std::size_t points = 0;
};

// Least-squares slope of -log10(p) against log10(rho) = snr_db/10 over
// [low_db, high_db]. Cells with zero probability are skipped.
DiversityFit estimate_diversity(std::span<const ResultPoint> curve, double low_db, double high_db);
DiversityFit estimate_diversity(std::span<const double> snr_db, std::span<const double> probability,
                                double low_db, double high_db);

// The top `span_db` of the grid.
std::pair<double, double> top_window(std::span<const ResultPoint> curve, double span_db = 15.0);

}  // namespace relaysim
