#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relaysim/channel.hpp"

namespace relaysim {

enum class Protocol {
    Direct,
    StandardStbc,
    RepetitionConcurrent,
    SuperpositionConcurrent,
    MSourceSuperposition,
};

// How a relay combines the two codewords it forwards in the BER chain.
// Mode1Sum: amplitude sum; Mode2Xor: point whose label is the XOR of the labels.
enum class SuperpositionMode { Mode1Sum, Mode2Xor };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);
bool is_concurrent(Protocol p);

struct ProtocolSpec {
    Protocol protocol = Protocol::SuperpositionConcurrent;
    std::size_t frame_length = 1;  // L, codewords per source per frame
    std::size_t sources = 2;       // M; fixed at 2 except for MSourceSuperposition
    std::size_t antennas = 1;      // N, destination antennas
    SuperpositionMode mode = SuperpositionMode::Mode1Sum;

    void validate() const;
    std::size_t codeword_count() const;
    std::size_t slot_count() const;
};

struct Transmitter {
    enum class Role { Source, Relay };
    Role role = Role::Source;
    std::size_t index = 0;  // source index, or 0/1 for R1/R2

    static Transmitter source(std::size_t i) { return {Role::Source, i}; }
    static Transmitter relay(std::size_t i) { return {Role::Relay, i}; }
    bool operator==(const Transmitter&) const = default;
};

std::string to_string(const Transmitter& tx);

// One terminal's contribution to a slot. `amplitude` is the square root of the
// terminal's share of the slot power; a relay forwarding k codewords puts
// amplitude/sqrt(k) on each of them in the Gaussian (mode 1) model. For a
// relay forwarding two codewords, codewords[0] is the newly decoded one and
// codewords[1] the overheard one.
struct Transmission {
    Transmitter tx;
    std::vector<std::size_t> codewords;
    double amplitude = 1.0;
};

struct Slot {
    std::vector<Transmission> transmissions;
    // Distributed Alamouti slot: each transmitter gets its own N-row
    // sub-block of virtual receive dimensions after orthogonal combining.
    bool space_time = false;
    std::size_t row_offset = 0;
    std::size_t rows = 0;

    double power() const;
};

using SlotMap = std::vector<Slot>;

// Stacked per-slot matrix mapping codewords (ordered x_1^1, x_2^1, ..., x_1^2,
// ...) to every receive dimension of every slot.
struct EquivalentChannel {
    CMatrix matrix;
    SlotMap slot_map;

    std::size_t slot_count() const { return slot_map.size(); }
    std::size_t codeword_count() const { return static_cast<std::size_t>(matrix.cols()); }
};

// Channel-independent slot maps.
SlotMap direct_slots(std::size_t frame_length);
SlotMap standard_slots(std::size_t frame_length);
SlotMap repetition_slots(std::size_t frame_length);
SlotMap msource_slots(std::size_t sources, std::size_t frame_length);
SlotMap make_slot_map(const ProtocolSpec& spec);

// Fills row offsets and builds the matrix for a given realization.
EquivalentChannel assemble(const ChannelRealization& ch, SlotMap slots, std::size_t codewords);

const CVector& link(const ChannelRealization& ch, const Transmitter& tx);

EquivalentChannel build_superposition_matrix(const ChannelRealization& ch, std::size_t frame_length);
EquivalentChannel build_repetition_matrix(const ChannelRealization& ch, std::size_t frame_length);
EquivalentChannel build_direct_matrix(const ChannelRealization& ch, std::size_t frame_length);
EquivalentChannel build_standard_schedule(const ChannelRealization& ch, std::size_t frame_length);
EquivalentChannel build_msource_matrix(const ChannelRealization& ch, std::size_t sources,
                                       std::size_t frame_length);
EquivalentChannel build_equivalent_channel(const ChannelRealization& ch, const ProtocolSpec& spec);

// Column submatrix restricted to the given 0-based codeword indices.
CMatrix subset_columns(const EquivalentChannel& h, std::span<const std::size_t> subset);

// Slots whose row block has a nonzero entry in the given column.
std::vector<std::size_t> column_support(const EquivalentChannel& h, std::size_t column);

}  // namespace relaysim
