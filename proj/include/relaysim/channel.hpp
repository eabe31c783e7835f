#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "relaysim/rng.hpp"

namespace relaysim {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Circularly-symmetric complex Gaussian, unit variance per complex entry.
class ComplexGaussian {
public:
    cplx operator()(Rng& rng) { return {normal_(rng), normal_(rng)}; }

private:
    std::normal_distribution<double> normal_{0.0, 0.70710678118654752440};
};

// Destination-facing fading vectors for one coherence interval.
struct ChannelRealization {
    std::vector<CVector> sources;
    CVector relay1;
    CVector relay2;

    std::size_t antennas() const { return static_cast<std::size_t>(relay1.size()); }
    std::size_t source_count() const { return sources.size(); }
    bool all_finite() const;
};

ChannelRealization draw_realization(Rng& rng, std::size_t n_antennas, std::size_t n_sources = 2);

// Unit-power AWGN samples for `dimension` receive dimensions.
CVector draw_noise(Rng& rng, std::size_t dimension);

// Every link set to the same constant vector; handy for hand-checked matrices.
ChannelRealization constant_realization(std::size_t n_antennas, std::size_t n_sources, cplx value);

}  // namespace relaysim
