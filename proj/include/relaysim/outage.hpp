#pragma once

#include <cstddef>
#include <cstdint>

#include "relaysim/schedule.hpp"

namespace relaysim {

// Per-codeword rate scale relative to r*log2(rho): slots used per codeword of one source.
double rate_scale(const ProtocolSpec& spec);

// Bits per codeword so that each source averages r*log2(rho) bits per slot.
double rate_from_multiplexing(double r, double rho, const ProtocolSpec& spec);

// Either a multiplexing gain (rate grows with SNR) or a fixed per-codeword rate.
struct RateTarget {
    enum class Kind { Multiplexing, Fixed };
    Kind kind = Kind::Multiplexing;
    double value = 0.0;

    static RateTarget multiplexing(double r) { return {Kind::Multiplexing, r}; }
    static RateTarget fixed(double bits) { return {Kind::Fixed, bits}; }
    double per_codeword_rate(const ProtocolSpec& spec, double rho) const;
    bool operator==(const RateTarget&) const = default;
};

// log2 det(I + rho * H * H^H), evaluated on the Gram form H^H H by Cholesky.
double mutual_info_subset(const CMatrix& h_sub, double rho);

enum class SubsetSearch {
    // Every one of the 2^K - 1 non-empty subsets.
    Exhaustive,
    // Only subsets whose columns form a connected graph under non-orthogonality.
    // A subset that splits into mutually orthogonal parts has additive log det,
    // so it can only be violated if one of its parts is.
    Connected,
};

struct OutageOptions {
    SubsetSearch search = SubsetSearch::Connected;
    std::size_t subset_limit = 20;  // max columns enumerated in one search
    // When nonzero, only subsets of these columns are constrained; the other
    // codewords are treated as known at the destination.
    std::uint64_t columns = 0;
};

// Mask of the codewords sent by one source (codeword c belongs to source c mod M).
std::uint64_t source_columns(const ProtocolSpec& spec, std::size_t source);

// True iff some non-empty codeword subset S has |S| * rate > I(S).
bool is_outage(const EquivalentChannel& h, double rho, double rate, const OutageOptions& options = {});
bool is_outage(const CMatrix& h, double rho, double rate, const OutageOptions& options = {});

}  // namespace relaysim
