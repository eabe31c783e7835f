#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "relaysim/chain.hpp"
#include "relaysim/outage.hpp"
#include "relaysim/result.hpp"

namespace relaysim {

inline constexpr const char* kVersion = "0.3.0";

enum class SimMode { Outage, Ber };

std::string_view to_string(SimMode mode);

struct SimConfig {
    ProtocolSpec spec;
    SimMode mode = SimMode::Outage;
    std::vector<double> snr_grid_db;
    RateTarget rate;                 // outage runs
    ConstellationRule constellation; // BER runs
    std::uint64_t trials = 1'000'000;       // outage: realizations per point
    std::uint64_t min_events = 500;         // BER stopping target; outage low-confidence flag
    std::uint64_t max_trials = 10'000'000;  // BER: realizations cap per point
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::uint64_t first_trial = 0;  // offset into the per-point trial index space
    std::uint64_t batch_size = 1000;
    OutageOptions outage;
    // Restrict outage to one source's codewords (others known); -1 = all codewords.
    int outage_source = -1;
    MlsdOptions mlsd;

    void validate() const;
};

// Same experiment up to the trial partition (first_trial, trials) and worker count.
bool same_experiment(const SimConfig& a, const SimConfig& b);

struct ResultCurve {
    SimConfig config;
    std::vector<ResultPoint> points;
    std::string code_version = kVersion;
    double wall_seconds = 0.0;
    bool cancelled = false;
};

struct RunHooks {
    // Called after each point completes: point index, realizations, events.
    std::function<void(std::size_t, std::uint64_t, std::uint64_t)> progress;
    std::stop_token stop;
};

// One realization per trial; trial t of point i draws from Rng(seed, i, t),
// so the result does not depend on the worker count.
ResultCurve run(const SimConfig& config, const RunHooks& hooks = {});

// Sums counts of partial runs of one experiment. Curves without points act as identity.
ResultCurve merge(std::span<const ResultCurve> partials);

ResultCurve outage_probability(const ProtocolSpec& spec, RateTarget rate, std::vector<double> snr_grid_db,
                               std::uint64_t trials, std::uint64_t seed, std::size_t workers = 1);

ResultCurve simulate_ber(const ProtocolSpec& spec, ConstellationRule rule, std::vector<double> snr_grid_db,
                         std::uint64_t min_bit_errors, std::uint64_t max_trials, std::uint64_t seed,
                         std::size_t workers = 1);

double db_to_linear(double db);

}  // namespace relaysim
