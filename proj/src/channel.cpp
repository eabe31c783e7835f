#include "relaysim/channel.hpp"

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

CVector gaussian_vector(Rng& rng, ComplexGaussian& gauss, std::size_t n) {
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = gauss(rng);
    }
    return v;
}

}  // namespace

bool ChannelRealization::all_finite() const {
    auto finite = [](const CVector& v) { return v.allFinite(); };
    for (const auto& h : sources) {
        if (!finite(h)) return false;
    }
    return finite(relay1) && finite(relay2);
}

ChannelRealization draw_realization(Rng& rng, std::size_t n_antennas, std::size_t n_sources) {
    require(n_antennas >= 1, "draw_realization: n_antennas must be >= 1");
    require(n_sources >= 1, "draw_realization: n_sources must be >= 1");
    ComplexGaussian gauss;
    ChannelRealization ch;
    ch.sources.reserve(n_sources);
    for (std::size_t i = 0; i < n_sources; ++i) {
        ch.sources.push_back(gaussian_vector(rng, gauss, n_antennas));
    }
    ch.relay1 = gaussian_vector(rng, gauss, n_antennas);
    ch.relay2 = gaussian_vector(rng, gauss, n_antennas);
    return ch;
}

CVector draw_noise(Rng& rng, std::size_t dimension) {
    require(dimension >= 1, "draw_noise: dimension must be >= 1");
    ComplexGaussian gauss;
    return gaussian_vector(rng, gauss, dimension);
}

ChannelRealization constant_realization(std::size_t n_antennas, std::size_t n_sources, cplx value) {
    require(n_antennas >= 1 && n_sources >= 1, "constant_realization: dimensions must be >= 1");
    const auto n = static_cast<Eigen::Index>(n_antennas);
    ChannelRealization ch;
    ch.sources.assign(n_sources, CVector::Constant(n, value));
    ch.relay1 = CVector::Constant(n, value);
    ch.relay2 = CVector::Constant(n, value);
    return ch;
}

}  // namespace relaysim
