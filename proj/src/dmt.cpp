#include "relaysim/dmt.hpp"

#include <algorithm>
#include <cmath>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

// Diversity at r = 0 and the multiplexing gain where it reaches zero.
std::pair<double, double> endpoints(Protocol protocol, std::size_t antennas, std::size_t frame_length,
                                    std::size_t sources) {
    require(antennas >= 1 && frame_length >= 1 && sources >= 1, "DMT parameters N, L, M must be >= 1");
    const auto n = static_cast<double>(antennas);
    const auto l = static_cast<double>(frame_length);
    const auto m = static_cast<double>(sources);
    switch (protocol) {
        case Protocol::Direct: return {n, 0.5};
        case Protocol::StandardStbc: return {3.0 * n, 0.25};
        case Protocol::RepetitionConcurrent: return {2.0 * n, l / (2.0 * l + 1.0)};
        case Protocol::SuperpositionConcurrent: return {3.0 * n, l / (2.0 * l + 2.0)};
        case Protocol::MSourceSuperposition: return {3.0 * n, l / (m * l + 2.0)};
    }
    throw ParameterError("unhandled protocol");
}

}  // namespace

double DmtCurve::at(double r) const {
    require(r >= 0.0, "DMT: multiplexing gain must be >= 0");
    if (r >= max_r) return 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        const auto [r0, d0] = breakpoints[i - 1];
        const auto [r1, d1] = breakpoints[i];
        if (r <= r1) return d0 + (d1 - d0) * (r - r0) / (r1 - r0);
    }
    return 0.0;
}

double theoretical_dmt(Protocol protocol, std::size_t antennas, std::size_t frame_length, std::size_t sources,
                       double r) {
    require(std::isfinite(r) && r >= 0.0, "DMT: multiplexing gain must be >= 0");
    const auto [d0, r_max] = endpoints(protocol, antennas, frame_length, sources);
    return std::max(0.0, d0 * (1.0 - r / r_max));
}

DmtCurve dmt_curve(Protocol protocol, std::size_t antennas, std::size_t frame_length, std::size_t sources) {
    const auto [d0, r_max] = endpoints(protocol, antennas, frame_length, sources);
    DmtCurve curve;
    curve.protocol = protocol;
    curve.antennas = antennas;
    curve.frame_length = frame_length;
    curve.sources = sources;
    curve.breakpoints = {{0.0, d0}, {r_max, 0.0}};
    curve.max_r = r_max;
    curve.max_d = d0;
    return curve;
}

std::vector<double> crossover_points(const DmtCurve& a, const DmtCurve& b) {
    const double end = std::max(a.max_r, b.max_r);
    std::vector<double> grid{0.0, end};
    for (const auto* c : {&a, &b}) {
        for (const auto& [r, d] : c->breakpoints) {
            if (r > 0.0 && r < end) grid.push_back(r);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto diff = [&](double r) { return a.at(r) - b.at(r); };
    constexpr double eps = 1e-12;
    std::vector<double> out;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double r0 = grid[i - 1];
        const double r1 = grid[i];
        const double f0 = diff(r0);
        const double f1 = diff(r1);
        if (std::abs(f0) <= eps && std::abs(f1) <= eps) {
            out.push_back(r0);
            out.push_back(r1);
        } else if (std::abs(f0) <= eps) {
            out.push_back(r0);
        } else if (std::abs(f1) > eps && (f0 < 0.0) != (f1 < 0.0)) {
            out.push_back(r0 + (r1 - r0) * f0 / (f0 - f1));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
              out.end());
    return out;
}

DiversityFit estimate_diversity(std::span<const double> snr_db, std::span<const double> probability,
                                double low_db, double high_db) {
    require(snr_db.size() == probability.size(), "estimate_diversity: mismatched inputs");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        if (snr_db[i] < low_db - 1e-9 || snr_db[i] > high_db + 1e-9) continue;
        if (!(probability[i] > 0.0)) continue;
        xs.push_back(snr_db[i] / 10.0);
        ys.push_back(-std::log10(probability[i]));
    }
    if (xs.size() < 3) {
        throw EstimationError("estimate_diversity: only " + std::to_string(xs.size()) +
                              " nonzero points in the window; at least 3 are needed (run more trials)");
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw EstimationError("estimate_diversity: window holds a single SNR value");
    DiversityFit fit;
    fit.slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double residual = ys[i] - (my + fit.slope * (xs[i] - mx));
        ssr += residual * residual;
    }
    fit.std_error = std::sqrt(ssr / (n - 2.0) / sxx);
    fit.points = xs.size();
    return fit;
}

DiversityFit estimate_diversity(std::span<const ResultPoint> curve, double low_db, double high_db) {
    std::vector<double> snr;
    std::vector<double> p;
    for (const auto& point : curve) {
        snr.push_back(point.snr_db);
        p.push_back(point.events ? point.estimate : 0.0);
    }
    return estimate_diversity(snr, p, low_db, high_db);
}

std::pair<double, double> top_window(std::span<const ResultPoint> curve, double span_db) {
    require(!curve.empty(), "top_window: empty curve");
    double high = curve.front().snr_db;
    for (const auto& p : curve) high = std::max(high, p.snr_db);
    return {high - span_db, high};
}

}  // namespace relaysim
