#include "relaysim/schedule.hpp"

#include <cmath>
#include <numbers>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

constexpr double kHalfPower = 1.0 / std::numbers::sqrt2;

// Relay active in 1-based slot t of a concurrent schedule: R1 on even slots.
Transmitter alternating_relay(std::size_t slot) {
    return Transmitter::relay(slot % 2 == 0 ? 0 : 1);
}

}  // namespace

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::Direct: return "direct";
        case Protocol::StandardStbc: return "standard";
        case Protocol::RepetitionConcurrent: return "repetition";
        case Protocol::SuperpositionConcurrent: return "superposition";
        case Protocol::MSourceSuperposition: return "msource";
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view name) {
    for (auto p : {Protocol::Direct, Protocol::StandardStbc, Protocol::RepetitionConcurrent,
                   Protocol::SuperpositionConcurrent, Protocol::MSourceSuperposition}) {
        if (to_string(p) == name) return p;
    }
    throw ParameterError("unknown protocol '" + std::string(name) +
                         "' (expected direct, standard, repetition, superposition or msource)");
}

bool is_concurrent(Protocol p) {
    return p == Protocol::RepetitionConcurrent || p == Protocol::SuperpositionConcurrent ||
           p == Protocol::MSourceSuperposition;
}

void ProtocolSpec::validate() const {
    require(frame_length >= 1, "frame length L must be >= 1");
    require(sources >= 1, "source count M must be >= 1");
    require(antennas >= 1, "antenna count N must be >= 1");
    if (protocol != Protocol::MSourceSuperposition) {
        require(sources == 2, std::string(to_string(protocol)) + " protocol is defined for M=2 only");
    }
}

std::size_t ProtocolSpec::codeword_count() const { return sources * frame_length; }

std::size_t ProtocolSpec::slot_count() const {
    const std::size_t k = codeword_count();
    switch (protocol) {
        case Protocol::Direct: return k;
        case Protocol::StandardStbc: return 2 * k;
        case Protocol::RepetitionConcurrent: return k + 1;
        case Protocol::SuperpositionConcurrent:
        case Protocol::MSourceSuperposition: return k + 2;
    }
    return 0;
}

std::string to_string(const Transmitter& tx) {
    return (tx.role == Transmitter::Role::Source ? "S" : "R") + std::to_string(tx.index + 1);
}

double Slot::power() const {
    double total = 0.0;
    for (const auto& t : transmissions) total += t.amplitude * t.amplitude;
    return total;
}

SlotMap direct_slots(std::size_t frame_length) {
    require(frame_length >= 1, "frame length L must be >= 1");
    SlotMap slots;
    for (std::size_t c = 0; c < 2 * frame_length; ++c) {
        slots.push_back({{{Transmitter::source(c % 2), {c}, 1.0}}});
    }
    return slots;
}

SlotMap standard_slots(std::size_t frame_length) {
    require(frame_length >= 1, "frame length L must be >= 1");
    SlotMap slots;
    for (std::size_t c = 0; c < 2 * frame_length; ++c) {
        slots.push_back({{{Transmitter::source(c % 2), {c}, 1.0}}});
        Slot relaying{{{Transmitter::relay(0), {c}, kHalfPower}, {Transmitter::relay(1), {c}, kHalfPower}}};
        relaying.space_time = true;
        slots.push_back(std::move(relaying));
    }
    return slots;
}

SlotMap repetition_slots(std::size_t frame_length) {
    require(frame_length >= 1, "frame length L must be >= 1");
    const std::size_t k = 2 * frame_length;
    SlotMap slots;
    slots.push_back({{{Transmitter::source(0), {0}, 1.0}}});
    for (std::size_t t = 2; t <= k; ++t) {
        const std::size_t c = t - 1;
        slots.push_back({{{alternating_relay(t), {c - 1}, kHalfPower},
                          {Transmitter::source(c % 2), {c}, kHalfPower}}});
    }
    slots.push_back({{{alternating_relay(k + 1), {k - 1}, 1.0}}});
    return slots;
}

SlotMap msource_slots(std::size_t sources, std::size_t frame_length) {
    require(sources >= 1, "source count M must be >= 1");
    require(frame_length >= 1, "frame length L must be >= 1");
    const std::size_t k = sources * frame_length;
    SlotMap slots;
    slots.push_back({{{Transmitter::source(0), {0}, 1.0}}});
    for (std::size_t t = 2; t <= k; ++t) {
        const std::size_t c = t - 1;
        Transmission relay{alternating_relay(t), {c - 1}, kHalfPower};
        if (c >= 2) relay.codewords.push_back(c - 2);
        slots.push_back({{relay, {Transmitter::source(c % sources), {c}, kHalfPower}}});
    }
    Transmission flush{alternating_relay(k + 1), {k - 1}, 1.0};
    if (k >= 2) flush.codewords.push_back(k - 2);
    slots.push_back({{flush}});
    slots.push_back({{{alternating_relay(k + 2), {k - 1}, 1.0}}});
    return slots;
}

SlotMap make_slot_map(const ProtocolSpec& spec) {
    spec.validate();
    switch (spec.protocol) {
        case Protocol::Direct: return direct_slots(spec.frame_length);
        case Protocol::StandardStbc: return standard_slots(spec.frame_length);
        case Protocol::RepetitionConcurrent: return repetition_slots(spec.frame_length);
        case Protocol::SuperpositionConcurrent: return msource_slots(2, spec.frame_length);
        case Protocol::MSourceSuperposition: return msource_slots(spec.sources, spec.frame_length);
    }
    throw ParameterError("unhandled protocol");
}

const CVector& link(const ChannelRealization& ch, const Transmitter& tx) {
    if (tx.role == Transmitter::Role::Relay) {
        return tx.index == 0 ? ch.relay1 : ch.relay2;
    }
    require(tx.index < ch.sources.size(), "channel realization lacks a vector for " + to_string(tx));
    return ch.sources[tx.index];
}

EquivalentChannel assemble(const ChannelRealization& ch, SlotMap slots, std::size_t codewords) {
    const std::size_t n = ch.antennas();
    require(n >= 1, "channel realization has no antennas");
    std::size_t rows = 0;
    for (auto& slot : slots) {
        slot.row_offset = rows;
        slot.rows = n * (slot.space_time ? slot.transmissions.size() : 1);
        rows += slot.rows;
    }

    EquivalentChannel h;
    h.matrix = CMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(codewords));
    const auto ni = static_cast<Eigen::Index>(n);
    for (const auto& slot : slots) {
        for (std::size_t k = 0; k < slot.transmissions.size(); ++k) {
            const auto& t = slot.transmissions[k];
            const CVector& g = link(ch, t.tx);
            require(static_cast<std::size_t>(g.size()) == n, "channel vectors must all have length N");
            const auto row = static_cast<Eigen::Index>(slot.row_offset + (slot.space_time ? k * n : 0));
            const double scale = t.amplitude / std::sqrt(static_cast<double>(t.codewords.size()));
            for (std::size_t c : t.codewords) {
                require(c < codewords, "slot map references codeword out of range");
                h.matrix.block(row, static_cast<Eigen::Index>(c), ni, 1) += scale * g;
            }
        }
    }
    h.slot_map = std::move(slots);
    return h;
}

EquivalentChannel build_superposition_matrix(const ChannelRealization& ch, std::size_t frame_length) {
    return assemble(ch, msource_slots(2, frame_length), 2 * frame_length);
}

EquivalentChannel build_repetition_matrix(const ChannelRealization& ch, std::size_t frame_length) {
    return assemble(ch, repetition_slots(frame_length), 2 * frame_length);
}

EquivalentChannel build_direct_matrix(const ChannelRealization& ch, std::size_t frame_length) {
    return assemble(ch, direct_slots(frame_length), 2 * frame_length);
}

EquivalentChannel build_standard_schedule(const ChannelRealization& ch, std::size_t frame_length) {
    return assemble(ch, standard_slots(frame_length), 2 * frame_length);
}

EquivalentChannel build_msource_matrix(const ChannelRealization& ch, std::size_t sources,
                                       std::size_t frame_length) {
    return assemble(ch, msource_slots(sources, frame_length), sources * frame_length);
}

EquivalentChannel build_equivalent_channel(const ChannelRealization& ch, const ProtocolSpec& spec) {
    return assemble(ch, make_slot_map(spec), spec.codeword_count());
}

CMatrix subset_columns(const EquivalentChannel& h, std::span<const std::size_t> subset) {
    require(!subset.empty(), "subset_columns: subset must be non-empty");
    CMatrix out(h.matrix.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j) {
        require(subset[j] < h.codeword_count(), "subset_columns: codeword index out of range");
        out.col(static_cast<Eigen::Index>(j)) = h.matrix.col(static_cast<Eigen::Index>(subset[j]));
    }
    return out;
}

std::vector<std::size_t> column_support(const EquivalentChannel& h, std::size_t column) {
    require(column < h.codeword_count(), "column_support: column out of range");
    std::vector<std::size_t> support;
    const auto col = static_cast<Eigen::Index>(column);
    for (std::size_t s = 0; s < h.slot_map.size(); ++s) {
        const auto& slot = h.slot_map[s];
        const auto block = h.matrix.block(static_cast<Eigen::Index>(slot.row_offset), col,
                                          static_cast<Eigen::Index>(slot.rows), 1);
        if (block.cwiseAbs2().sum() > 0.0) support.push_back(s);
    }
    return support;
}

}  // namespace relaysim
