#include "relaysim/chain.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

unsigned random_label(Rng& rng, unsigned order) {
    return static_cast<unsigned>(rng() >> 32) % order;  // order is a power of two
}

CVector noise_or_zero(Rng& rng, std::size_t n, bool noiseless) {
    if (noiseless) return CVector::Zero(static_cast<Eigen::Index>(n));
    return draw_noise(rng, n);
}

std::uint64_t bit_errors(unsigned sent, unsigned detected) {
    return static_cast<std::uint64_t>(std::popcount(sent ^ detected));
}

FrameOutcome direct_frame(const ProtocolSpec& spec, const ChannelRealization& ch, const Constellation& cons,
                          double rho, Rng& rng, bool noiseless) {
    const SlotMap slots = direct_slots(spec.frame_length);
    const double root_rho = std::sqrt(rho);
    FrameOutcome out;
    for (const auto& slot : slots) {
        const auto& t = slot.transmissions.front();
        const CVector& h = link(ch, t.tx);
        const unsigned label = random_label(rng, cons.order());
        const CVector y = (root_rho * t.amplitude * cons.point(label)) * h + noise_or_zero(rng, ch.antennas(), noiseless);
        out.bit_errors += bit_errors(label, mrc_detect(y, h, root_rho * t.amplitude, cons));
        out.bits += cons.bits_per_symbol();
    }
    return out;
}

FrameOutcome standard_frame(const ProtocolSpec& spec, const ChannelRealization& ch, const Constellation& cons,
                            double rho, Rng& rng, bool noiseless) {
    const SlotMap slots = standard_slots(spec.frame_length);
    const double root_rho = std::sqrt(rho);
    const std::size_t n = ch.antennas();
    FrameOutcome out;
    for (std::size_t s = 0; s + 1 < slots.size(); s += 2) {
        const CVector& hs = link(ch, slots[s].transmissions.front().tx);
        const CVector& h1 = link(ch, slots[s + 1].transmissions[0].tx);
        const CVector& h2 = link(ch, slots[s + 1].transmissions[1].tx);
        const unsigned labels[2] = {random_label(rng, cons.order()), random_label(rng, cons.order())};
        const cplx sym[2] = {cons.point(labels[0]), cons.point(labels[1])};

        // Broadcast: two channel uses from the source at full power.
        CVector direct[2];
        for (int u = 0; u < 2; ++u) {
            direct[u] = (root_rho * sym[u]) * hs + noise_or_zero(rng, n, noiseless);
        }
        // Relaying: distributed Alamouti over two channel uses.
        const AlamoutiBlock block = alamouti_transmit(sym[0], sym[1]);
        CVector relayed[2];
        for (int u = 0; u < 2; ++u) {
            relayed[u] = root_rho * (block[u][0] * h1 + block[u][1] * h2) + noise_or_zero(rng, n, noiseless);
        }
        const AlamoutiCombined comb = alamouti_combine(relayed[0], relayed[1], h1, h2);

        // Maximal ratio combination of the direct matched filter and the Alamouti output.
        const double gain = root_rho * (hs.squaredNorm() + 0.5 * comb.gain);
        const cplx stats[2] = {hs.dot(direct[0]) + comb.first / std::numbers::sqrt2,
                               hs.dot(direct[1]) + comb.second / std::numbers::sqrt2};
        for (int u = 0; u < 2; ++u) {
            out.bit_errors += bit_errors(labels[u], min_distance_detect(stats[u], gain, cons));
            out.bits += cons.bits_per_symbol();
        }
    }
    return out;
}

FrameOutcome concurrent_frame(const ProtocolSpec& spec, const ChannelRealization& ch, const Constellation& cons,
                              double rho, Rng& rng, bool noiseless, const MlsdOptions& mlsd) {
    const SlotMap slots = make_slot_map(spec);
    const std::size_t k = spec.codeword_count();
    std::vector<unsigned> labels(k);
    for (auto& l : labels) l = random_label(rng, cons.order());

    std::vector<CVector> received;
    received.reserve(slots.size());
    for (const auto& slot : slots) {
        received.push_back(slot_signal(slot, ch, labels, cons, spec.mode, rho) +
                           noise_or_zero(rng, ch.antennas(), noiseless));
    }
    const auto detected = mlsd_detect(received, ch, slots, k, cons, spec.mode, rho, mlsd);

    FrameOutcome out;
    for (std::size_t c = 0; c < k; ++c) {
        out.bit_errors += bit_errors(labels[c], detected[c]);
        out.bits += cons.bits_per_symbol();
    }
    return out;
}

}  // namespace

unsigned ConstellationRule::order_for(Protocol p) const {
    if (order_override) return *order_override;
    switch (p) {
        case Protocol::Direct: return 4;
        case Protocol::StandardStbc: return 16;
        default: return 8;
    }
}

FrameOutcome transmit_frame(const ProtocolSpec& spec, const ChannelRealization& ch,
                            const Constellation& constellation, double rho, Rng& rng, bool noiseless,
                            const MlsdOptions& mlsd) {
    spec.validate();
    require(rho >= 0.0 && std::isfinite(rho), "transmit_frame: SNR must be finite and >= 0");
    require(ch.antennas() == spec.antennas, "transmit_frame: realization has the wrong antenna count");
    switch (spec.protocol) {
        case Protocol::Direct: return direct_frame(spec, ch, constellation, rho, rng, noiseless);
        case Protocol::StandardStbc: return standard_frame(spec, ch, constellation, rho, rng, noiseless);
        default: return concurrent_frame(spec, ch, constellation, rho, rng, noiseless, mlsd);
    }
}

}  // namespace relaysim
