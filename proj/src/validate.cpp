#include "relaysim/validate.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "relaysim/chain.hpp"
#include "relaysim/error.hpp"
#include "relaysim/outage.hpp"

namespace relaysim {

namespace {

SlotMap slots_with_fault(const ProtocolSpec& spec, InjectedFault fault) {
    SlotMap slots = make_slot_map(spec);
    if (fault == InjectedFault::BadScaling) {
        for (auto& slot : slots) {
            for (auto& t : slot.transmissions) {
                if (t.tx.role == Transmitter::Role::Relay) {
                    t.amplitude *= 1.1;
                    break;
                }
            }
        }
    }
    return slots;
}

std::vector<ProtocolSpec> structural_grid() {
    std::vector<ProtocolSpec> specs;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t l = 1; l <= 5; ++l) {
            for (auto p : {Protocol::Direct, Protocol::StandardStbc, Protocol::RepetitionConcurrent,
                           Protocol::SuperpositionConcurrent}) {
                specs.push_back({p, l, 2, n});
            }
            for (std::size_t m = 1; m <= 4; ++m) {
                specs.push_back({Protocol::MSourceSuperposition, l, m, n});
            }
        }
    }
    return specs;
}

std::string describe(const ProtocolSpec& s) {
    std::ostringstream os;
    os << to_string(s.protocol) << " L=" << s.frame_length << " M=" << s.sources << " N=" << s.antennas;
    return os.str();
}

std::size_t expected_paths(Protocol p) {
    switch (p) {
        case Protocol::Direct: return 1;
        case Protocol::StandardStbc:
        case Protocol::RepetitionConcurrent: return 2;
        default: return 3;
    }
}

CheckResult check_constellations() {
    CheckResult r{"constellation-energy-and-labels", true, ""};
    for (unsigned order : {4u, 8u, 16u}) {
        const auto c = Constellation::qam(order);
        if (std::abs(c.average_energy() - 1.0) > 1e-12) {
            r.passed = false;
            r.detail = std::to_string(order) + "-QAM energy " + std::to_string(c.average_energy());
        }
        // Gray: nearest neighbours differ in exactly one bit.
        double dmin = 1e9;
        for (unsigned a = 0; a < order; ++a)
            for (unsigned b = a + 1; b < order; ++b) dmin = std::min(dmin, std::abs(c.point(a) - c.point(b)));
        for (unsigned a = 0; a < order; ++a) {
            for (unsigned b = a + 1; b < order; ++b) {
                if (std::abs(std::abs(c.point(a) - c.point(b)) - dmin) < 1e-9 && std::popcount(a ^ b) != 1) {
                    r.passed = false;
                    r.detail = std::to_string(order) + "-QAM neighbours " + std::to_string(a) + "," +
                               std::to_string(b) + " differ in more than one bit";
                }
            }
        }
    }
    return r;
}

CheckResult check_power(InjectedFault fault) {
    CheckResult r{"slot-power-sums", true, ""};
    for (const auto& spec : structural_grid()) {
        const SlotMap slots = slots_with_fault(spec, fault);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (std::abs(slots[s].power() - 1.0) > 1e-12) {
                r.passed = false;
                r.detail = describe(spec) + " slot " + std::to_string(s + 1) + " power " +
                           std::to_string(slots[s].power());
                return r;
            }
        }
        if (slots.size() != spec.slot_count()) {
            r.passed = false;
            r.detail = describe(spec) + " has " + std::to_string(slots.size()) + " slots";
            return r;
        }
    }
    return r;
}

CheckResult check_paths(const ValidationOptions& options) {
    CheckResult r{"codeword-path-counts", true, ""};
    Rng rng(options.seed, 1);
    for (const auto& spec : structural_grid()) {
        const auto ch = draw_realization(rng, spec.antennas, spec.sources);
        const auto h = assemble(ch, slots_with_fault(spec, options.fault), spec.codeword_count());
        const std::size_t want = expected_paths(spec.protocol);
        for (std::size_t c = 0; c < h.codeword_count(); ++c) {
            const auto got = column_support(h, c).size();
            if (got != want) {
                r.passed = false;
                r.detail = describe(spec) + " codeword " + std::to_string(c) + " touches " + std::to_string(got) +
                           " slots, expected " + std::to_string(want);
                return r;
            }
        }
    }
    return r;
}

CheckResult check_msource_specialization(const ValidationOptions& options) {
    CheckResult r{"msource-m2-equals-superposition", true, ""};
    Rng rng(options.seed, 2);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t l = 1; l <= 5; ++l) {
            const auto ch = draw_realization(rng, n, 2);
            const auto a = assemble(ch, slots_with_fault({Protocol::MSourceSuperposition, l, 2, n}, options.fault),
                                    2 * l);
            const auto b = build_superposition_matrix(ch, l);
            if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols() ||
                (a.matrix - b.matrix).cwiseAbs().maxCoeff() != 0.0) {
                r.passed = false;
                r.detail = "mismatch at N=" + std::to_string(n) + " L=" + std::to_string(l);
                return r;
            }
        }
    }
    return r;
}

CheckResult check_reference_matrix(InjectedFault fault) {
    CheckResult r{"superposition-reference-matrix", true, ""};
    const double a = 1.0 / std::sqrt(2.0);
    const auto ch = constant_realization(1, 2, 1.0);
    const CMatrix got = assemble(ch, slots_with_fault({Protocol::SuperpositionConcurrent, 2, 2, 1}, fault), 4).matrix;
    CMatrix want(6, 4);
    want << 1, 0, 0, 0,  //
        a, a, 0, 0,      //
        0.5, 0.5, a, 0,  //
        0, 0.5, 0.5, a,  //
        0, 0, a, a,      //
        0, 0, 0, 1;
    if ((got - want).cwiseAbs().maxCoeff() > 1e-15) {
        r.passed = false;
        r.detail = "L=2 unit-gain matrix differs from the reference";
    }
    return r;
}

CheckResult check_oracle(const ValidationOptions& options) {
    CheckResult r{"outage-pruned-vs-exhaustive", true, ""};
    Rng rng(options.seed, 3);
    const OutageOptions exhaustive{SubsetSearch::Exhaustive, 20};
    const OutageOptions pruned{SubsetSearch::Connected, 20};
    std::uint64_t mismatches = 0;
    std::uint64_t outages = 0;
    for (std::size_t k : {2u, 3u, 4u}) {
        for (std::uint64_t i = 0; i < options.oracle_instances; ++i) {
            const auto protocol = (i % 3 == 0)   ? Protocol::SuperpositionConcurrent
                                  : (i % 3 == 1) ? Protocol::RepetitionConcurrent
                                                 : Protocol::Direct;
            const std::size_t n = 1 + i % 2;
            const auto ch = draw_realization(rng, n, k);
            ProtocolSpec spec{Protocol::MSourceSuperposition, 1, k, n};
            if (k % 2 == 0) spec = {protocol, k / 2, 2, n};
            const auto h = assemble(ch, slots_with_fault(spec, options.fault), spec.codeword_count());
            const double rho = std::pow(10.0, (5.0 + 30.0 * rng.uniform()) / 10.0);
            const double rate = 0.5 + 8.0 * rng.uniform();
            const bool want = is_outage(h, rho, rate, exhaustive);
            outages += want;
            if (is_outage(h, rho, rate, pruned) != want) ++mismatches;
        }
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(mismatches) + " mismatches, " + std::to_string(outages) + " outage instances";
    return r;
}

CheckResult check_noiseless(const ValidationOptions& options) {
    CheckResult r{"noiseless-recovery", true, ""};
    Rng rng(options.seed, 4);
    std::vector<ProtocolSpec> specs = {
        {Protocol::Direct, 2, 2, 2},
        {Protocol::StandardStbc, 2, 2, 2},
        {Protocol::RepetitionConcurrent, 1, 2, 2},
        {Protocol::SuperpositionConcurrent, 2, 2, 2, SuperpositionMode::Mode1Sum},
        {Protocol::SuperpositionConcurrent, 2, 2, 2, SuperpositionMode::Mode2Xor},
    };
    const ConstellationRule rule;
    for (const auto& spec : specs) {
        const auto cons = Constellation::qam(rule.order_for(spec.protocol));
        for (int t = 0; t < 50; ++t) {
            const auto ch = draw_realization(rng, spec.antennas, spec.sources);
            const auto f = transmit_frame(spec, ch, cons, 10.0, rng, true);
            if (f.bit_errors) {
                r.passed = false;
                r.detail = describe(spec) + " decoded with bit errors";
                return r;
            }
        }
    }
    return r;
}

CheckResult check_mode2_involution() {
    CheckResult r{"mode2-involution", true, ""};
    for (unsigned order : {4u, 8u, 16u}) {
        const auto c = Constellation::qam(order);
        for (unsigned a = 0; a < order; ++a) {
            for (unsigned b = 0; b < order; ++b) {
                const cplx once = superpose_mode2(c.point(a), c.point(b), c);
                if (superpose_mode2(once, c.point(b), c) != c.point(a)) {
                    r.passed = false;
                    r.detail = std::to_string(order) + "-QAM pair " + std::to_string(a) + "," + std::to_string(b);
                }
            }
        }
    }
    return r;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    std::vector<CheckResult> results;
    auto guarded = [&](const std::string& name, auto&& check) {
        try {
            results.push_back(check());
        } catch (const std::exception& e) {
            results.push_back({name, false, e.what()});
        }
    };
    guarded("constellation-energy-and-labels", [] { return check_constellations(); });
    guarded("mode2-involution", [] { return check_mode2_involution(); });
    guarded("slot-power-sums", [&] { return check_power(options.fault); });
    guarded("codeword-path-counts", [&] { return check_paths(options); });
    guarded("msource-m2-equals-superposition", [&] { return check_msource_specialization(options); });
    guarded("superposition-reference-matrix", [&] { return check_reference_matrix(options.fault); });
    guarded("outage-pruned-vs-exhaustive", [&] { return check_oracle(options); });
    guarded("noiseless-recovery", [&] { return check_noiseless(options); });
    return results;
}

}  // namespace relaysim
