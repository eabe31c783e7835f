// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "relaysim/chain.hpp"
#include "relaysim/dmt.hpp"
#include "relaysim/error.hpp"
#include "relaysim/outage.hpp"
#include "relaysim/sim.hpp"

using namespace relaysim;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        note(why);
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t workers() { return std::max(1U, std::thread::hardware_concurrency()); }

// 1 -----------------------------------------------------------------------

Verdict dmt_formulas() {
    Verdict v;
    constexpr double tol = 1e-12;
    int bad = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const double N = static_cast<double>(n);
        for (std::size_t l = 1; l <= 8; ++l) {
            const double L = static_cast<double>(l);
            auto expect = [&](Protocol p, std::size_t m, double r, double want) {
                if (std::abs(theoretical_dmt(p, n, l, m, r) - want) > tol) ++bad;
            };
            expect(Protocol::RepetitionConcurrent, 2, 0.0, 2 * N);
            expect(Protocol::RepetitionConcurrent, 2, L / (2 * L + 1), 0.0);
            expect(Protocol::SuperpositionConcurrent, 2, 0.0, 3 * N);
            expect(Protocol::SuperpositionConcurrent, 2, L / (2 * L + 2), 0.0);
            for (std::size_t m = 1; m <= 4; ++m) {
                expect(Protocol::MSourceSuperposition, m, 0.0, 3 * N);
                expect(Protocol::MSourceSuperposition, m, L / (static_cast<double>(m) * L + 2), 0.0);
            }
            const auto xs = crossover_points(dmt_curve(Protocol::RepetitionConcurrent, n, l),
                                             dmt_curve(Protocol::StandardStbc, n, 1));
            if (xs.size() != 1 || std::abs(xs[0] - L / (8 * L - 2)) > tol) ++bad;
        }
    }
    if (bad > 0) v.fail(fmt("%d formula mismatches", bad));
    v.note("N 1..4, L 1..8, M 1..4, tolerance 1e-12");
    return v;
}

// 2 -----------------------------------------------------------------------

struct SlopeTarget {
    const char* label;
    Protocol protocol;
    std::size_t frame_length;
    double want;
    double tol;
};

// Cells entering a slope fit must hold at least this many events.
constexpr std::uint64_t kMinFitEvents = 10;

DiversityFit fit_reliable(const ResultCurve& curve, std::pair<double, double> window) {
    std::vector<double> snr;
    std::vector<double> p;
    for (const auto& pt : curve.points) {
        if (pt.events < kMinFitEvents) continue;
        snr.push_back(pt.snr_db);
        p.push_back(pt.estimate);
    }
    return estimate_diversity(snr, p, window.first, window.second);
}

Verdict outage_slopes() {
    Verdict v;
    const SlopeTarget targets[] = {
        {"direct", Protocol::Direct, 1, 4.0 / 3.0, 0.3},
        {"standard", Protocol::StandardStbc, 1, 2.0, 0.3},
        {"repetition", Protocol::RepetitionConcurrent, 1, 2.0, 0.3},
        {"superposition", Protocol::SuperpositionConcurrent, 2, 3.0, 0.35},
    };
    std::vector<double> grid;
    for (double db = 10.0; db <= 40.0 + 1e-9; db += 2.5) grid.push_back(db);

    DiversityFit rep_fit;
    DiversityFit std_fit;
    bool rep_ok = false;
    bool std_ok = false;
    for (const auto& t : targets) {
        SimConfig c;
        c.spec = {t.protocol, t.frame_length, 2, 2};
        c.snr_grid_db = grid;
        c.rate = RateTarget::multiplexing(1.0 / 6.0);
        c.trials = 1'000'000;
        c.seed = 20240601;
        c.workers = workers();
        const auto curve = run(c);
        const auto window = top_window(curve.points);
        std::string events = "events";
        for (const auto& pt : curve.points) {
            if (pt.snr_db >= window.first) events += fmt(" %g:%llu", pt.snr_db, static_cast<unsigned long long>(pt.events));
        }
        try {
            const auto fit = fit_reliable(curve, window);
            const bool ok = std::abs(fit.slope - t.want) <= t.tol;
            const auto text = fmt("%s slope %.3f +- %.3f (%zu cells, want %.3f +- %.2f)", t.label, fit.slope,
                                  fit.std_error, fit.points, t.want, t.tol);
            if (ok) {
                v.note(text);
            } else {
                v.fail(text);
            }
            if (t.protocol == Protocol::RepetitionConcurrent) rep_fit = fit, rep_ok = true;
            if (t.protocol == Protocol::StandardStbc) std_fit = fit, std_ok = true;
        } catch (const EstimationError&) {
            v.fail(fmt("%s: fewer than 3 cells with >= %llu events in %g-%g dB (%s)", t.label,
                       static_cast<unsigned long long>(kMinFitEvents), window.first, window.second, events.c_str()));
        }
    }
    if (rep_ok && std_ok) {
        const double z = std::abs(rep_fit.slope - std_fit.slope) /
                         std::hypot(rep_fit.std_error, std_fit.std_error);
        const auto text = fmt("repetition vs standard |z| = %.2f (limit 1.96)", z);
        if (z <= 1.96) {
            v.note(text);
        } else {
            v.fail(text);
        }
    } else {
        v.fail("repetition vs standard comparison unavailable");
    }
    return v;
}

// 3 -----------------------------------------------------------------------

struct BerCurve {
    std::vector<double> snr;
    std::vector<double> ber;
    std::vector<std::uint64_t> errors;
};

constexpr double kBerFloor = 1e-5;

// Sweeps upward in 2 dB steps until BER falls to the target.
BerCurve ber_sweep(const ProtocolSpec& spec, std::uint64_t seed) {
    BerCurve out;
    for (double db = 0.0; db <= 40.0 + 1e-9; db += 2.0) {
        SimConfig c;
        c.spec = spec;
        c.mode = SimMode::Ber;
        c.snr_grid_db = {db};
        c.min_events = 500;
        c.max_trials = 10'000'000;
        c.batch_size = 2000;
        c.seed = seed + static_cast<std::uint64_t>(db * 10);
        c.workers = workers();
        const auto pt = run(c).points.front();
        out.snr.push_back(db);
        out.ber.push_back(pt.estimate);
        out.errors.push_back(pt.events);
        if (pt.estimate <= kBerFloor) break;
    }
    return out;
}

DiversityFit ber_slope(const BerCurve& c) {
    const double high = c.snr.back();
    std::vector<double> snr;
    std::vector<double> p;
    for (std::size_t i = 0; i < c.snr.size(); ++i) {
        if (c.errors[i] < kMinFitEvents) continue;
        snr.push_back(c.snr[i]);
        p.push_back(c.ber[i]);
    }
    return estimate_diversity(snr, p, high - 15.0, high);
}

// SNR where log10 BER crosses the target, by linear interpolation in dB.
double snr_at(const BerCurve& c, double target) {
    for (std::size_t i = 1; i < c.snr.size(); ++i) {
        if (c.ber[i - 1] >= target && c.ber[i] < target && c.ber[i] > 0.0) {
            const double a = std::log10(c.ber[i - 1]);
            const double b = std::log10(c.ber[i]);
            return c.snr[i - 1] + (std::log10(target) - a) / (b - a) * (c.snr[i] - c.snr[i - 1]);
        }
    }
    return std::nan("");
}

Verdict ber_figure() {
    Verdict v;
    struct Case {
        const char* label;
        ProtocolSpec spec;
        BerCurve curve;
        DiversityFit fit;
    };
    std::vector<Case> cases = {
        {"direct", {Protocol::Direct, 1, 2, 2}, {}, {}},
        {"standard", {Protocol::StandardStbc, 1, 2, 2}, {}, {}},
        {"repetition", {Protocol::RepetitionConcurrent, 1, 2, 2}, {}, {}},
        {"superposition-mode1", {Protocol::SuperpositionConcurrent, 2, 2, 2, SuperpositionMode::Mode1Sum}, {}, {}},
        {"superposition-mode2", {Protocol::SuperpositionConcurrent, 2, 2, 2, SuperpositionMode::Mode2Xor}, {}, {}},
    };
    std::uint64_t seed = 5150;
    for (auto& c : cases) {
        c.curve = ber_sweep(c.spec, seed);
        seed += 1000;
        try {
            c.fit = ber_slope(c.curve);
            v.note(fmt("%s slope %.2f (to %g dB, BER %.2g)", c.label, c.fit.slope, c.curve.snr.back(),
                       c.curve.ber.back()));
        } catch (const EstimationError& e) {
            v.fail(fmt("%s: %s", c.label, e.what()));
        }
    }
    if (!v.pass) return v;

    // (a) direct has the shallowest slope.
    for (std::size_t i = 1; i < cases.size(); ++i) {
        if (cases[i].fit.slope <= cases[0].fit.slope) v.fail(fmt("(a) %s not steeper than direct", cases[i].label));
    }
    // (b) superposition slopes within 15% of the standard slope.
    for (std::size_t i = 3; i < cases.size(); ++i) {
        const double rel = std::abs(cases[i].fit.slope - cases[1].fit.slope) / cases[1].fit.slope;
        const auto text = fmt("(b) %s vs standard %.1f%%", cases[i].label, 100.0 * rel);
        if (rel <= 0.15) {
            v.note(text);
        } else {
            v.fail(text + " (limit 15%)");
        }
    }
    // (c) mode-2 advantage at BER 1e-4.
    const double gap = snr_at(cases[3].curve, 1e-4) - snr_at(cases[4].curve, 1e-4);
    const auto text = fmt("(c) mode gap at 1e-4 = %.2f dB (want 1.7 +- 0.5)", gap);
    if (std::isfinite(gap) && std::abs(gap - 1.7) <= 0.5) {
        v.note(text);
    } else {
        v.fail(text);
    }
    return v;
}

// 4 -----------------------------------------------------------------------

bool brute_force_outage(const CMatrix& h, double rho, double rate) {
    const auto k = static_cast<std::size_t>(h.cols());
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << k); ++s) {
        std::vector<Eigen::Index> cols;
        for (std::size_t c = 0; c < k; ++c) {
            if ((s >> c) & 1U) cols.push_back(static_cast<Eigen::Index>(c));
        }
        CMatrix sub(h.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = h.col(cols[j]);
        const CMatrix a = CMatrix::Identity(h.rows(), h.rows()) + rho * sub * sub.adjoint();
        if (static_cast<double>(cols.size()) * rate > std::log2(std::abs(a.partialPivLu().determinant()))) return true;
    }
    return false;
}

Verdict oracle_equivalence() {
    Verdict v;
    struct Shape {
        std::size_t k;
        ProtocolSpec spec;
    };
    const Shape shapes[] = {
        {2, {Protocol::SuperpositionConcurrent, 1}},
        {3, {Protocol::MSourceSuperposition, 1, 3}},
        {4, {Protocol::SuperpositionConcurrent, 2}},
    };
    Rng rng(424242);
    for (const auto& shape : shapes) {
        int mismatches = 0;
        int outages = 0;
        constexpr int instances = 10'000;
        for (int i = 0; i < instances; ++i) {
            ProtocolSpec spec = shape.spec;
            spec.antennas = 1 + static_cast<std::size_t>(rng() % 3);
            const auto h = build_equivalent_channel(draw_realization(rng, spec.antennas, spec.sources), spec);
            const double rho = std::pow(10.0, 3.0 * rng.uniform());
            const double rate = 2.0 * rng.uniform() * std::log2(1.0 + rho);
            const bool want = brute_force_outage(h.matrix, rho, rate);
            outages += want ? 1 : 0;
            if (is_outage(h, rho, rate, {SubsetSearch::Connected}) != want) ++mismatches;
            if (is_outage(h, rho, rate, {SubsetSearch::Exhaustive}) != want) ++mismatches;
        }
        const auto text = fmt("K=%zu: %d mismatches in %d instances (%d outages)", shape.k, mismatches, instances, outages);
        if (mismatches == 0) {
            v.note(text);
        } else {
            v.fail(text);
        }
    }
    return v;
}

// 5 -----------------------------------------------------------------------

Verdict direct_closed_form() {
    Verdict v;
    SimConfig c;
    c.spec = {Protocol::Direct, 1, 2, 1};
    c.snr_grid_db = {0, 5, 10, 15, 20, 25, 30};
    c.rate = RateTarget::fixed(2.0);
    c.trials = 1'000'000;
    c.outage_source = 0;
    c.seed = 777;
    c.workers = workers();
    double worst = 0.0;
    for (const auto& p : run(c).points) {
        const double q = 1.0 - std::exp(-(std::exp2(2.0) - 1.0) / db_to_linear(p.snr_db));
        const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(p.trials));
        const double z = std::abs(p.estimate - q) / se;
        worst = std::max(worst, z);
        if (z > 3.0) v.fail(fmt("%g dB: %.4g vs %.4g (%.2f SE)", p.snr_db, p.estimate, q, z));
    }
    v.note(fmt("R=2 bits, 0-30 dB, 1e6 trials, worst deviation %.2f SE (limit 3)", worst));
    return v;
}

// 6 -----------------------------------------------------------------------

Verdict structural() {
    Verdict v;
    Rng rng(66);
    int bad = 0;
    std::size_t checked = 0;
    for (std::size_t l = 1; l <= 5; ++l) {
        for (const auto& slots : {direct_slots(l), standard_slots(l), repetition_slots(l)}) {
            for (const auto& s : slots) bad += std::abs(s.power() - 1.0) > 1e-12 ? 1 : 0;
        }
        for (std::size_t m = 1; m <= 4; ++m) {
            for (const auto& s : msource_slots(m, l)) bad += std::abs(s.power() - 1.0) > 1e-12 ? 1 : 0;
        }
        for (std::size_t n = 1; n <= 4; ++n) {
            const auto ch = draw_realization(rng, n, 4);
            const auto sup = build_superposition_matrix(ch, l);
            const auto rep = build_repetition_matrix(ch, l);
            for (std::size_t c = 0; c < 2 * l; ++c) {
                bad += column_support(sup, c).size() != 3 ? 1 : 0;
                bad += column_support(rep, c).size() != 2 ? 1 : 0;
            }
            for (std::size_t m = 1; m <= 4; ++m) {
                const auto ms = build_msource_matrix(ch, m, l);
                for (std::size_t c = 0; c < m * l; ++c) bad += column_support(ms, c).size() != 3 ? 1 : 0;
                ++checked;
            }
            if ((build_msource_matrix(ch, 2, l).matrix - sup.matrix).cwiseAbs().maxCoeff() != 0.0) ++bad;
        }
    }
    if (bad > 0) v.fail(fmt("%d violations", bad));
    v.note(fmt("%zu (L, M, N) combinations", checked));
    return v;
}

// 7 -----------------------------------------------------------------------

Verdict determinism() {
    Verdict v;
    SimConfig outage;
    outage.spec = {Protocol::SuperpositionConcurrent, 2, 2, 2};
    outage.snr_grid_db = {10, 15, 20};
    outage.rate = RateTarget::multiplexing(1.0 / 6.0);
    outage.trials = 200'000;
    outage.seed = 99;

    SimConfig ber;
    ber.spec = {Protocol::SuperpositionConcurrent, 1, 2, 2, SuperpositionMode::Mode2Xor};
    ber.mode = SimMode::Ber;
    ber.snr_grid_db = {5, 10};
    ber.min_events = 500;
    ber.max_trials = 100'000;
    ber.seed = 98;

    for (SimConfig* c : {&outage, &ber}) {
        std::vector<std::uint64_t> reference;
        for (std::size_t w : {1U, 4U, 8U}) {
            c->workers = w;
            std::vector<std::uint64_t> counts;
            for (const auto& p : run(*c).points) {
                counts.push_back(p.events);
                counts.push_back(p.trials);
            }
            if (reference.empty()) {
                reference = counts;
            } else if (counts != reference) {
                v.fail(fmt("%s counts differ at %zu workers", std::string(to_string(c->mode)).c_str(), w));
            }
        }
    }
    v.note("outage and BER, workers 1/4/8");
    return v;
}

// 8 -----------------------------------------------------------------------

Verdict noiseless() {
    Verdict v;
    const ProtocolSpec specs[] = {
        {Protocol::Direct, 2},
        {Protocol::StandardStbc, 2},
        {Protocol::RepetitionConcurrent, 2, 2, 1, SuperpositionMode::Mode1Sum},
        {Protocol::RepetitionConcurrent, 2, 2, 1, SuperpositionMode::Mode2Xor},
        {Protocol::SuperpositionConcurrent, 2, 2, 1, SuperpositionMode::Mode1Sum},
        {Protocol::SuperpositionConcurrent, 2, 2, 1, SuperpositionMode::Mode2Xor},
        {Protocol::MSourceSuperposition, 1, 3, 1, SuperpositionMode::Mode1Sum},
        {Protocol::MSourceSuperposition, 1, 3, 1, SuperpositionMode::Mode2Xor},
    };
    Rng rng(8);
    for (const auto& spec : specs) {
        const auto cons = Constellation::qam(ConstellationRule{}.order_for(spec.protocol));
        std::uint64_t errors = 0;
        for (int t = 0; t < 1000; ++t) {
            errors += transmit_frame(spec, draw_realization(rng, spec.antennas, spec.sources), cons, 10.0, rng, true)
                          .bit_errors;
        }
        if (errors != 0) {
            v.fail(fmt("%s mode %d: %llu bit errors", std::string(to_string(spec.protocol)).c_str(),
                       spec.mode == SuperpositionMode::Mode1Sum ? 1 : 2, static_cast<unsigned long long>(errors)));
        }
    }
    v.note("8 protocol/mode combinations x 1000 frames");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> check;
    };
    const Criterion criteria[] = {
        {1, "dmt-formulas", dmt_formulas},
        {2, "outage-slopes", outage_slopes},
        {3, "ber-curves", ber_figure},
        {4, "oracle-equivalence", oracle_equivalence},
        {5, "direct-closed-form", direct_closed_form},
        {6, "structural-invariants", structural},
        {7, "determinism", determinism},
        {8, "noiseless-recovery", noiseless},
    };
    // Optional argument: run only the listed criterion numbers.
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.id == 1 && secs >= 1.0) v.fail(fmt("took %.2f s (limit 1 s)", secs));
        std::printf("%s %d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, secs, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
