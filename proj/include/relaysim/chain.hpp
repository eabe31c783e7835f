#pragma once

#include <cstdint>
#include <optional>

#include "relaysim/modem.hpp"

namespace relaysim {

// Modulation order per protocol; by default the orders that give every
// protocol 2 bits per channel use (4-QAM direct, 8-QAM concurrent, 16-QAM standard).
struct ConstellationRule {
    std::optional<unsigned> order_override;

    unsigned order_for(Protocol p) const;
    bool operator==(const ConstellationRule&) const = default;
};

struct FrameOutcome {
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
};

// One coherence interval of the uncoded chain: random labels for every
// codeword, genie-decoded relays, destination detection (MRC for direct and
// standard, MLSD for concurrent protocols). Labels and noise come from `rng`.
// The standard protocol sends two symbols per codeword so the relays can form
// an Alamouti pair.
FrameOutcome transmit_frame(const ProtocolSpec& spec, const ChannelRealization& ch,
                            const Constellation& constellation, double rho, Rng& rng, bool noiseless = false,
                            const MlsdOptions& mlsd = {});

}  // namespace relaysim
