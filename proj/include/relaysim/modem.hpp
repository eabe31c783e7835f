#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "relaysim/schedule.hpp"

namespace relaysim {

// Unit-energy QAM alphabet. Point i carries label i; bit 0 of a label string
// is its most significant bit. Axis levels use binary-reflected Gray order
// (00,01,11,10 -> -3,-1,+1,+3; single bit 0,1 -> +1,-1), so every
// constellation here is Gray labeled:
//   4-QAM : b0 -> I, b1 -> Q, scale 1/sqrt(2)
//   8-QAM : b0b1 -> I in {-3,-1,1,3}, b2 -> Q in {+1,-1}, scale 1/sqrt(6)
//   16-QAM: b0b1 -> I, b2b3 -> Q, both in {-3,-1,1,3}, scale 1/sqrt(10)
class Constellation {
public:
    static Constellation qam(unsigned order);

    unsigned order() const { return static_cast<unsigned>(points_.size()); }
    unsigned bits_per_symbol() const { return bits_; }
    std::span<const cplx> points() const { return points_; }
    cplx point(unsigned label) const { return points_.at(label); }

    double average_energy() const;

    cplx modulate(std::span<const std::uint8_t> bits) const;
    std::vector<std::uint8_t> demodulate_hard(cplx symbol) const;

    // Label of the nearest point; ties go to the lowest label.
    unsigned nearest(cplx symbol) const;
    // Label of a point that must be an exact member of the alphabet.
    unsigned label_of(cplx point) const;

    // index, real, imag, label bits; one line per point.
    void write_table(std::ostream& os) const;

private:
    Constellation(std::vector<cplx> points, unsigned bits) : points_(std::move(points)), bits_(bits) {}

    std::vector<cplx> points_;
    unsigned bits_;
};

std::vector<std::uint8_t> label_bits(unsigned label, unsigned width);

// Mode 1 relay symbol: amplitude sum, unit average energy for independent inputs.
cplx superpose_mode1(cplx desired, cplx interference);

// Mode 2 relay symbol: the point whose label is the XOR of the two labels.
unsigned superpose_mode2(unsigned desired_label, unsigned interference_label);
cplx superpose_mode2(cplx desired, cplx interference, const Constellation& constellation);

// Two channel uses by two transmitters: block[time][transmitter], with each
// transmitter at half power.
using AlamoutiBlock = std::array<std::array<cplx, 2>, 2>;
AlamoutiBlock alamouti_transmit(cplx s1, cplx s2);

// Linear combiner outputs: first = a*gain*s1 + w1, second = a*gain*s2 + w2
// where a is the per-transmitter amplitude, gain = |h1|^2 + |h2|^2 and the
// noise terms have variance gain times the per-dimension noise variance.
struct AlamoutiCombined {
    cplx first;
    cplx second;
    double gain = 0.0;
};
AlamoutiCombined alamouti_combine(const CVector& r1, const CVector& r2, const CVector& h1, const CVector& h2);

// argmin_s |z - scale*s|^2 over the alphabet.
unsigned min_distance_detect(cplx z, cplx scale, const Constellation& constellation);

// argmin_s ||received - amplitude*h*s||^2 over the alphabet.
unsigned mrc_detect(const CVector& received, const CVector& h, double amplitude,
                    const Constellation& constellation);

// The symbol one transmitter sends given every codeword's label.
cplx transmitted_symbol(const Transmission& t, std::span<const unsigned> labels,
                        const Constellation& constellation, SuperpositionMode mode);

// sqrt(rho) * sum of every transmission in a single-stream slot.
CVector slot_signal(const Slot& slot, const ChannelRealization& ch, std::span<const unsigned> labels,
                    const Constellation& constellation, SuperpositionMode mode, double rho);

struct MlsdOptions {
    std::uint64_t hypothesis_budget = 1ULL << 16;
};

// Maximum-likelihood sequence detection over every codeword label sequence,
// searched depth-first with branch-and-bound pruning (exact). `received` holds one N-vector per slot of `slots`. Returns the
// minimizing label sequence; ties go to the lexicographically smallest one.
std::vector<unsigned> mlsd_detect(std::span<const CVector> received, const ChannelRealization& ch,
                                  const SlotMap& slots, std::size_t codewords,
                                  const Constellation& constellation, SuperpositionMode mode, double rho,
                                  const MlsdOptions& options = {});

}  // namespace relaysim
