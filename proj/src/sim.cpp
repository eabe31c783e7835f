#include "relaysim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "relaysim/error.hpp"

namespace relaysim {

namespace {

struct Counts {
    std::uint64_t realizations = 0;
    std::uint64_t trials = 0;
    std::uint64_t events = 0;
};

class TrialRunner {
public:
    explicit TrialRunner(const SimConfig& config)
        : config_(config), cons_(Constellation::qam(config.constellation.order_for(config.spec.protocol))) {
        outage_ = config.outage;
        if (config.outage_source >= 0) {
            outage_.columns = source_columns(config.spec, static_cast<std::size_t>(config.outage_source));
        }
    }

    // Counts for trials [begin, end) of one SNR point.
    Counts batch(std::size_t point, std::uint64_t begin, std::uint64_t end, const std::stop_token& stop) const {
        const double rho = db_to_linear(config_.snr_grid_db[point]);
        const double rate =
            config_.mode == SimMode::Outage ? config_.rate.per_codeword_rate(config_.spec, rho) : 0.0;
        Counts c;
        for (std::uint64_t t = begin; t < end; ++t) {
            if (stop.stop_requested()) break;
            Rng rng(config_.seed, point, t);
            const ChannelRealization ch = draw_realization(rng, config_.spec.antennas, config_.spec.sources);
            ++c.realizations;
            if (config_.mode == SimMode::Outage) {
                const EquivalentChannel h = build_equivalent_channel(ch, config_.spec);
                ++c.trials;
                if (is_outage(h, rho, rate, outage_)) ++c.events;
            } else {
                const FrameOutcome f = transmit_frame(config_.spec, ch, cons_, rho, rng, false, config_.mlsd);
                c.trials += f.bits;
                c.events += f.bit_errors;
            }
        }
        return c;
    }

private:
    const SimConfig& config_;
    Constellation cons_;
    OutageOptions outage_;
};

// Evaluates `jobs` batches on up to `workers` threads; results land by index.
template <typename Job>
void parallel_for(std::size_t jobs, std::size_t workers, Job&& job) {
    workers = std::max<std::size_t>(1, std::min(workers, jobs));
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < jobs && !failed; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(SimMode mode) { return mode == SimMode::Outage ? "outage" : "ber"; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void SimConfig::validate() const {
    spec.validate();
    require(!snr_grid_db.empty(), "SNR grid must not be empty");
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
        require(std::isfinite(snr_grid_db[i]), "SNR grid values must be finite");
        if (i) require(snr_grid_db[i] > snr_grid_db[i - 1], "SNR grid must be strictly increasing");
    }
    require(workers >= 1, "workers must be >= 1");
    require(batch_size >= 1, "batch size must be >= 1");
    if (mode == SimMode::Outage) {
        require(trials >= 1, "trials must be >= 1");
        require(std::isfinite(rate.value) && rate.value >= 0.0, "rate / multiplexing gain must be >= 0");
        require(outage_source < static_cast<int>(spec.sources), "outage source index out of range");
        if (rate.kind == RateTarget::Kind::Multiplexing && rate.value > 0.0) {
            require(snr_grid_db.front() > 0.0, "multiplexing-gain runs need SNR > 0 dB at every point");
        }
    } else {
        require(max_trials >= 1, "max trials must be >= 1");
        Constellation::qam(constellation.order_for(spec.protocol));
    }
}

bool same_experiment(const SimConfig& a, const SimConfig& b) {
    const auto& sa = a.spec;
    const auto& sb = b.spec;
    return sa.protocol == sb.protocol && sa.frame_length == sb.frame_length && sa.sources == sb.sources &&
           sa.antennas == sb.antennas && sa.mode == sb.mode && a.mode == b.mode && a.snr_grid_db == b.snr_grid_db &&
           a.rate == b.rate && a.constellation == b.constellation && a.seed == b.seed &&
           a.min_events == b.min_events && a.batch_size == b.batch_size && a.outage_source == b.outage_source;
}

ResultCurve run(const SimConfig& config, const RunHooks& hooks) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const TrialRunner runner(config);
    ResultCurve curve;
    curve.config = config;

    for (std::size_t point = 0; point < config.snr_grid_db.size(); ++point) {
        if (hooks.stop.stop_requested()) {
            curve.cancelled = true;
            break;
        }
        Counts total;
        const std::uint64_t begin = config.first_trial;
        if (config.mode == SimMode::Outage) {
            const std::uint64_t batches = (config.trials + config.batch_size - 1) / config.batch_size;
            std::vector<Counts> parts(batches);
            parallel_for(batches, config.workers, [&](std::size_t b) {
                const std::uint64_t lo = begin + b * config.batch_size;
                const std::uint64_t hi = std::min(lo + config.batch_size, begin + config.trials);
                parts[b] = runner.batch(point, lo, hi, hooks.stop);
            });
            for (const auto& p : parts) {
                total.realizations += p.realizations;
                total.trials += p.trials;
                total.events += p.events;
            }
        } else {
            // Batches are evaluated in rounds but accepted strictly in index
            // order, so the stopping point is the same for any worker count.
            const std::uint64_t end = begin + config.max_trials;
            std::uint64_t next = begin;
            bool done = false;
            while (!done && next < end) {
                const std::size_t round = std::max<std::size_t>(1, config.workers);
                std::vector<Counts> parts(round);
                std::vector<std::uint64_t> starts(round);
                std::size_t used = 0;
                for (; used < round && next < end; ++used) {
                    starts[used] = next;
                    next = std::min(next + config.batch_size, end);
                }
                parallel_for(used, config.workers, [&](std::size_t b) {
                    const std::uint64_t hi = std::min(starts[b] + config.batch_size, end);
                    parts[b] = runner.batch(point, starts[b], hi, hooks.stop);
                });
                for (std::size_t b = 0; b < used; ++b) {
                    total.realizations += parts[b].realizations;
                    total.trials += parts[b].trials;
                    total.events += parts[b].events;
                    if (total.events >= config.min_events) {
                        done = true;
                        break;
                    }
                }
                if (hooks.stop.stop_requested()) done = true;
            }
        }

        ResultPoint p;
        p.snr_db = config.snr_grid_db[point];
        p.trials = total.trials;
        p.events = total.events;
        p.realizations = total.realizations;
        p.low_confidence = total.events < config.min_events;
        p.refresh();
        curve.points.push_back(p);
        if (hooks.progress) hooks.progress(point, total.realizations, total.events);
    }
    if (hooks.stop.stop_requested()) curve.cancelled = true;
    curve.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return curve;
}

ResultCurve merge(std::span<const ResultCurve> partials) {
    const ResultCurve* base = nullptr;
    for (const auto& c : partials) {
        if (c.points.empty()) continue;
        if (!base) {
            base = &c;
            continue;
        }
        if (!same_experiment(base->config, c.config) || c.points.size() != base->points.size()) {
            throw MergeError("merge: partial results come from different experiments");
        }
    }
    if (!base) {
        if (partials.empty()) throw MergeError("merge: nothing to merge");
        return partials.front();
    }

    ResultCurve out;
    out.config = base->config;
    out.config.first_trial = 0;
    out.config.trials = 0;
    out.code_version = base->code_version;
    out.points.resize(base->points.size());
    for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].snr_db = base->points[i].snr_db;
    for (const auto& c : partials) {
        if (c.points.empty()) continue;
        out.config.trials += c.config.trials;
        out.wall_seconds += c.wall_seconds;
        out.cancelled = out.cancelled || c.cancelled;
        for (std::size_t i = 0; i < out.points.size(); ++i) {
            out.points[i].trials += c.points[i].trials;
            out.points[i].events += c.points[i].events;
            out.points[i].realizations += c.points[i].realizations;
        }
    }
    for (auto& p : out.points) {
        p.low_confidence = p.events < out.config.min_events;
        p.refresh();
    }
    return out;
}

ResultCurve outage_probability(const ProtocolSpec& spec, RateTarget rate, std::vector<double> snr_grid_db,
                               std::uint64_t trials, std::uint64_t seed, std::size_t workers) {
    SimConfig config;
    config.spec = spec;
    config.mode = SimMode::Outage;
    config.snr_grid_db = std::move(snr_grid_db);
    config.rate = rate;
    config.trials = trials;
    config.seed = seed;
    config.workers = workers;
    return run(config);
}

ResultCurve simulate_ber(const ProtocolSpec& spec, ConstellationRule rule, std::vector<double> snr_grid_db,
                         std::uint64_t min_bit_errors, std::uint64_t max_trials, std::uint64_t seed,
                         std::size_t workers) {
    SimConfig config;
    config.spec = spec;
    config.mode = SimMode::Ber;
    config.snr_grid_db = std::move(snr_grid_db);
    config.constellation = rule;
    config.min_events = min_bit_errors;
    config.max_trials = max_trials;
    config.seed = seed;
    config.workers = workers;
    return run(config);
}

}  // namespace relaysim
