#include "relaysim/modem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

// Gray-ordered amplitude levels indexed by the axis bits.
double gray_level_2bit(unsigned bits) {
    static constexpr double levels[4] = {-3.0, -1.0, 3.0, 1.0};  // 00,01,10,11
    return levels[bits & 3u];
}

double gray_level_1bit(unsigned bit) { return bit ? -1.0 : 1.0; }

}  // namespace

Constellation Constellation::qam(unsigned order) {
    std::vector<cplx> points(order);
    switch (order) {
        case 4:
            for (unsigned l = 0; l < 4; ++l) {
                points[l] = cplx(gray_level_1bit(l >> 1), gray_level_1bit(l & 1u)) / std::sqrt(2.0);
            }
            return Constellation(std::move(points), 2);
        case 8:
            for (unsigned l = 0; l < 8; ++l) {
                points[l] = cplx(gray_level_2bit(l >> 1), gray_level_1bit(l & 1u)) / std::sqrt(6.0);
            }
            return Constellation(std::move(points), 3);
        case 16:
            for (unsigned l = 0; l < 16; ++l) {
                points[l] = cplx(gray_level_2bit(l >> 2), gray_level_2bit(l & 3u)) / std::sqrt(10.0);
            }
            return Constellation(std::move(points), 4);
        default:
            throw ParameterError("unsupported QAM order " + std::to_string(order) + " (expected 4, 8 or 16)");
    }
}

double Constellation::average_energy() const {
    double total = 0.0;
    for (const auto& p : points_) total += std::norm(p);
    return total / static_cast<double>(points_.size());
}

cplx Constellation::modulate(std::span<const std::uint8_t> bits) const {
    require(bits.size() == bits_, "modulate: expected " + std::to_string(bits_) + " bits, got " +
                                      std::to_string(bits.size()));
    unsigned label = 0;
    for (auto b : bits) {
        require(b <= 1, "modulate: bits must be 0 or 1");
        label = (label << 1) | b;
    }
    return points_[label];
}

std::vector<std::uint8_t> Constellation::demodulate_hard(cplx symbol) const {
    return label_bits(nearest(symbol), bits_);
}

unsigned Constellation::nearest(cplx symbol) const {
    unsigned best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    for (unsigned l = 0; l < points_.size(); ++l) {
        const double metric = std::norm(symbol - points_[l]);
        if (metric < best_metric) {
            best_metric = metric;
            best = l;
        }
    }
    return best;
}

unsigned Constellation::label_of(cplx point) const {
    const unsigned l = nearest(point);
    require(std::norm(point - points_[l]) < 1e-18, "label_of: symbol is not a constellation point");
    return l;
}

void Constellation::write_table(std::ostream& os) const {
    os << "index,real,imag,label\n";
    const auto old_precision = os.precision(17);
    for (unsigned l = 0; l < points_.size(); ++l) {
        os << l << ',' << points_[l].real() << ',' << points_[l].imag() << ',';
        for (auto b : label_bits(l, bits_)) os << static_cast<int>(b);
        os << '\n';
    }
    os.precision(old_precision);
}

std::vector<std::uint8_t> label_bits(unsigned label, unsigned width) {
    std::vector<std::uint8_t> bits(width);
    for (unsigned i = 0; i < width; ++i) {
        bits[i] = static_cast<std::uint8_t>((label >> (width - 1 - i)) & 1u);
    }
    return bits;
}

cplx superpose_mode1(cplx desired, cplx interference) {
    return (desired + interference) / std::numbers::sqrt2;
}

unsigned superpose_mode2(unsigned desired_label, unsigned interference_label) {
    return desired_label ^ interference_label;
}

cplx superpose_mode2(cplx desired, cplx interference, const Constellation& constellation) {
    return constellation.point(superpose_mode2(constellation.label_of(desired), constellation.label_of(interference)));
}

AlamoutiBlock alamouti_transmit(cplx s1, cplx s2) {
    constexpr double a = 1.0 / std::numbers::sqrt2;
    return {{{a * s1, a * s2}, {-a * std::conj(s2), a * std::conj(s1)}}};
}

AlamoutiCombined alamouti_combine(const CVector& r1, const CVector& r2, const CVector& h1, const CVector& h2) {
    require(r1.size() == h1.size() && r2.size() == h1.size() && h2.size() == h1.size(),
            "alamouti_combine: dimension mismatch");
    AlamoutiCombined out;
    out.first = h1.dot(r1) + (h2.array() * r2.conjugate().array()).sum();
    out.second = h2.dot(r1) - (h1.array() * r2.conjugate().array()).sum();
    out.gain = h1.squaredNorm() + h2.squaredNorm();
    return out;
}

unsigned min_distance_detect(cplx z, cplx scale, const Constellation& constellation) {
    unsigned best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    const auto points = constellation.points();
    for (unsigned l = 0; l < points.size(); ++l) {
        const double metric = std::norm(z - scale * points[l]);
        if (metric < best_metric) {
            best_metric = metric;
            best = l;
        }
    }
    return best;
}

unsigned mrc_detect(const CVector& received, const CVector& h, double amplitude,
                    const Constellation& constellation) {
    require(received.size() == h.size(), "mrc_detect: dimension mismatch");
    unsigned best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    const auto points = constellation.points();
    for (unsigned l = 0; l < points.size(); ++l) {
        const double metric = (received - (amplitude * points[l]) * h).squaredNorm();
        if (metric < best_metric) {
            best_metric = metric;
            best = l;
        }
    }
    return best;
}

cplx transmitted_symbol(const Transmission& t, std::span<const unsigned> labels,
                        const Constellation& constellation, SuperpositionMode mode) {
    switch (t.codewords.size()) {
        case 1:
            return constellation.point(labels[t.codewords[0]]);
        case 2: {
            const unsigned a = labels[t.codewords[0]];
            const unsigned b = labels[t.codewords[1]];
            if (mode == SuperpositionMode::Mode2Xor) {
                return constellation.point(superpose_mode2(a, b));
            }
            return superpose_mode1(constellation.point(a), constellation.point(b));
        }
        default:
            throw ParameterError("transmitted_symbol: a terminal forwards one or two codewords");
    }
}

CVector slot_signal(const Slot& slot, const ChannelRealization& ch, std::span<const unsigned> labels,
                    const Constellation& constellation, SuperpositionMode mode, double rho) {
    require(!slot.space_time, "slot_signal: space-time slots need the Alamouti chain");
    CVector y = CVector::Zero(static_cast<Eigen::Index>(ch.antennas()));
    const double root_rho = std::sqrt(rho);
    for (const auto& t : slot.transmissions) {
        y += (root_rho * t.amplitude * transmitted_symbol(t, labels, constellation, mode)) * link(ch, t.tx);
    }
    return y;
}

namespace {

// Per-slot metric tables indexed by the labels of the codewords the slot carries.
struct SlotTable {
    std::vector<std::size_t> codewords;  // sorted, unique
    std::vector<double> metric;
};

class SequenceSearch {
public:
    SequenceSearch(std::vector<std::vector<const SlotTable*>> by_last, std::size_t codewords, unsigned order)
        : by_last_(std::move(by_last)), labels_(codewords, 0), best_(codewords, 0), order_(order) {}

    std::vector<unsigned> run() {
        seed_greedy();
        descend(0, 0.0);
        return best_;
    }

private:
    double increment(std::size_t depth) const {
        double metric = 0.0;
        for (const SlotTable* table : by_last_[depth]) {
            std::size_t index = 0;
            for (auto it = table->codewords.rbegin(); it != table->codewords.rend(); ++it) {
                index = index * order_ + labels_[*it];
            }
            metric += table->metric[index];
        }
        return metric;
    }

    // Symbol-by-symbol decisions give the initial bound for pruning.
    void seed_greedy() {
        double total = 0.0;
        for (std::size_t depth = 0; depth < labels_.size(); ++depth) {
            unsigned pick = 0;
            double pick_metric = std::numeric_limits<double>::infinity();
            for (unsigned l = 0; l < order_; ++l) {
                labels_[depth] = l;
                const double m = increment(depth);
                if (m < pick_metric) {
                    pick_metric = m;
                    pick = l;
                }
            }
            labels_[depth] = pick;
            total += pick_metric;
        }
        best_ = labels_;
        best_metric_ = total;
    }

    // Metrics are non-negative, so a prefix already worse than the best full
    // sequence cannot lead to a better one. Equal prefixes are kept so ties
    // still resolve to the lexicographically smallest sequence.
    void descend(std::size_t depth, double partial) {
        if (depth == labels_.size()) {
            if (partial < best_metric_ || (partial == best_metric_ && labels_ < best_)) {
                best_metric_ = partial;
                best_ = labels_;
            }
            return;
        }
        for (unsigned l = 0; l < order_; ++l) {
            labels_[depth] = l;
            const double metric = partial + increment(depth);
            if (metric > best_metric_) continue;
            descend(depth + 1, metric);
        }
    }

    std::vector<std::vector<const SlotTable*>> by_last_;
    std::vector<unsigned> labels_;
    std::vector<unsigned> best_;
    unsigned order_;
    double best_metric_ = std::numeric_limits<double>::infinity();
};

}  // namespace

std::vector<unsigned> mlsd_detect(std::span<const CVector> received, const ChannelRealization& ch,
                                  const SlotMap& slots, std::size_t codewords,
                                  const Constellation& constellation, SuperpositionMode mode, double rho,
                                  const MlsdOptions& options) {
    require(codewords >= 1, "mlsd_detect: no codewords");
    require(received.size() == slots.size(), "mlsd_detect: one received vector per slot expected");
    const unsigned order = constellation.order();
    double hypotheses = std::pow(static_cast<double>(order), static_cast<double>(codewords));
    if (hypotheses > static_cast<double>(options.hypothesis_budget)) {
        throw CapacityError("mlsd_detect: " + std::to_string(order) + "^" + std::to_string(codewords) +
                            " hypotheses exceed the budget of " + std::to_string(options.hypothesis_budget) +
                            "; use a smaller frame length or constellation");
    }

    const auto n = static_cast<std::size_t>(ch.antennas());
    const double root_rho = std::sqrt(rho);
    std::vector<SlotTable> tables(slots.size());
    std::vector<std::vector<const SlotTable*>> by_last(codewords);
    std::vector<unsigned> labels(codewords, 0);
    std::vector<std::vector<cplx>> contrib;
    std::vector<cplx> signal(n);

    for (std::size_t s = 0; s < slots.size(); ++s) {
        const Slot& slot = slots[s];
        require(!slot.space_time, "mlsd_detect: space-time slots are not supported");
        require(static_cast<std::size_t>(received[s].size()) == n, "mlsd_detect: received vector length != N");
        SlotTable& table = tables[s];
        for (const auto& t : slot.transmissions) {
            for (auto c : t.codewords) {
                require(c < codewords, "mlsd_detect: slot references codeword out of range");
                table.codewords.push_back(c);
            }
        }
        std::sort(table.codewords.begin(), table.codewords.end());
        table.codewords.erase(std::unique(table.codewords.begin(), table.codewords.end()), table.codewords.end());
        if (table.codewords.empty()) continue;

        // Each transmitter's received contribution for every label combination
        // of the codewords it carries.
        const std::size_t senders = slot.transmissions.size();
        contrib.resize(senders);
        for (std::size_t k = 0; k < senders; ++k) {
            const auto& t = slot.transmissions[k];
            const CVector& h = link(ch, t.tx);
            std::size_t combos = 1;
            for (std::size_t j = 0; j < t.codewords.size(); ++j) combos *= order;
            contrib[k].resize(combos * n);
            for (std::size_t sub = 0; sub < combos; ++sub) {
                std::size_t rest = sub;
                for (auto c : t.codewords) {
                    labels[c] = static_cast<unsigned>(rest % order);
                    rest /= order;
                }
                const cplx sym = root_rho * t.amplitude * transmitted_symbol(t, labels, constellation, mode);
                for (std::size_t i = 0; i < n; ++i) contrib[k][sub * n + i] = sym * h[static_cast<Eigen::Index>(i)];
            }
        }

        std::size_t size = 1;
        for (std::size_t j = 0; j < table.codewords.size(); ++j) size *= order;
        table.metric.resize(size);
        for (std::size_t index = 0; index < size; ++index) {
            std::size_t rest = index;
            for (auto c : table.codewords) {
                labels[c] = static_cast<unsigned>(rest % order);
                rest /= order;
            }
            for (std::size_t i = 0; i < n; ++i) signal[i] = received[s][static_cast<Eigen::Index>(i)];
            for (std::size_t k = 0; k < senders; ++k) {
                const auto& cws = slot.transmissions[k].codewords;
                std::size_t sub = 0;
                for (std::size_t j = cws.size(); j-- > 0;) sub = sub * order + labels[cws[j]];
                const cplx* part = &contrib[k][sub * n];
                for (std::size_t i = 0; i < n; ++i) signal[i] -= part[i];
            }
            double metric = 0.0;
            for (std::size_t i = 0; i < n; ++i) metric += std::norm(signal[i]);
            table.metric[index] = metric;
        }
        by_last[table.codewords.back()].push_back(&table);
    }

    return SequenceSearch(std::move(by_last), codewords, order).run();
}

}  // namespace relaysim
