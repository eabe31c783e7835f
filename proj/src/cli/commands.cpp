#include "relaysim/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "relaysim/cli/csv.hpp"
#include "relaysim/cli/experiment.hpp"
#include "relaysim/dmt.hpp"
#include "relaysim/error.hpp"
#include "relaysim/validate.hpp"

namespace relaysim::cli {

namespace {

struct RunFlags {
    std::string config;
    std::string out;
    std::string sidecar;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string snr_db;
    std::string protocol = "superposition";
    std::size_t frame_length = 1;
    std::size_t sources = 2;
    std::size_t antennas = 1;
    std::string r;
    std::string rate;
    int sp_mode = 1;
    std::optional<unsigned> qam;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> min_events;
    std::optional<std::uint64_t> max_trials;
    std::optional<std::uint64_t> batch_size;
    bool exhaustive = false;
    bool quiet = false;
    std::optional<int> source;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, SimMode mode) {
    cmd->add_option("--config", f.config, "Experiment file (JSON) declaring one or more runs");
    cmd->add_option("--out", f.out, "Output CSV path (stdout when omitted)");
    cmd->add_option("--json", f.sidecar, "Write a JSON metadata sidecar to this path");
    cmd->add_option("--seed", f.seed, "64-bit seed");
    cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--snr-db", f.snr_db, "SNR grid in dB, start:step:stop or a,b,c");
    cmd->add_option("--protocol", f.protocol, "direct | standard | repetition | superposition | msource");
    cmd->add_option("-L,--L", f.frame_length, "Codewords per source per frame");
    cmd->add_option("-M,--M", f.sources, "Sources (msource protocol)");
    cmd->add_option("-N,--N", f.antennas, "Destination antennas");
    cmd->add_option("--batch-size", f.batch_size, "Trials per scheduling batch");
    cmd->add_flag("-q,--quiet", f.quiet, "No progress output");
    if (mode == SimMode::Outage) {
        cmd->add_option("--r", f.r, "Multiplexing gain, e.g. 1/6");
        cmd->add_option("--rate", f.rate, "Fixed rate in bits per codeword");
        cmd->add_option("--trials", f.trials, "Channel realizations per SNR point");
        cmd->add_option("--min-events", f.min_events, "Outages below which a point is flagged low-confidence");
        cmd->add_flag("--exhaustive", f.exhaustive, "Enumerate all 2^K-1 rate constraints");
        cmd->add_option("--source", f.source, "Count outages of this source only (1-based)")
            ->check(CLI::PositiveNumber);
    } else {
        cmd->add_option("--sp-mode", f.sp_mode, "Relay superposition: 1 = sum, 2 = XOR")->check(CLI::IsMember({1, 2}));
        cmd->add_option("--qam", f.qam, "Override the modulation order (4, 8 or 16)");
        cmd->add_option("--min-errors", f.min_events, "Bit errors to collect per SNR point");
        cmd->add_option("--max-trials", f.max_trials, "Realization cap per SNR point");
    }
}

std::size_t worker_cap(std::size_t requested) {
    if (const char* env = std::getenv(kMaxWorkersEnv)) {
        try {
            const auto cap = static_cast<std::size_t>(std::stoull(env));
            if (cap >= 1) return std::min(requested, cap);
        } catch (const std::exception&) {
            throw ConfigError(std::string(kMaxWorkersEnv) + " must be a positive integer");
        }
    }
    return requested;
}

std::vector<RunRequest> requests_from_flags(const RunFlags& f, SimMode mode) {
    std::vector<RunRequest> runs;
    if (!f.config.empty()) {
        runs = load_experiment(f.config, mode);
    } else {
        RunRequest req;
        req.name = "cli";
        SimConfig& c = req.config;
        c.mode = mode;
        try {
            c.spec.protocol = parse_protocol(f.protocol);
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
        c.spec.frame_length = f.frame_length;
        c.spec.sources = f.sources;
        c.spec.antennas = f.antennas;
        c.spec.mode = f.sp_mode == 2 ? SuperpositionMode::Mode2Xor : SuperpositionMode::Mode1Sum;
        if (f.snr_db.empty()) throw ConfigError("--snr-db is required without --config");
        c.snr_grid_db = parse_snr_grid(f.snr_db);
        if (mode == SimMode::Outage) {
            if (f.r.empty() == f.rate.empty()) throw ConfigError("outage needs exactly one of --r or --rate");
            c.rate = f.r.empty() ? RateTarget::fixed(parse_rational(f.rate)) : RateTarget::multiplexing(parse_rational(f.r));
        }
        c.constellation.order_override = f.qam;
        req.output = f.out;
        req.sidecar = f.sidecar;
        runs.push_back(std::move(req));
    }
    for (auto& req : runs) {
        SimConfig& c = req.config;
        if (f.seed) c.seed = *f.seed;
        if (f.workers) c.workers = *f.workers;
        if (f.trials) c.trials = *f.trials;
        if (f.min_events) c.min_events = *f.min_events;
        if (f.max_trials) c.max_trials = *f.max_trials;
        if (f.batch_size) c.batch_size = *f.batch_size;
        if (f.exhaustive) c.outage.search = SubsetSearch::Exhaustive;
        if (f.source) c.outage_source = *f.source - 1;
        c.workers = worker_cap(c.workers);
        try {
            c.validate();
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    return runs;
}

void write_outputs(const RunRequest& req, const ResultCurve& curve, std::ostream& out) {
    if (req.output.empty() || req.output == "-") {
        write_csv(out, curve);
    } else {
        // Write to a temporary first so a failed run never leaves a partial file.
        const std::string tmp = req.output + ".tmp";
        {
            std::ofstream file(tmp);
            if (!file) throw Error("cannot write '" + req.output + "'");
            write_csv(file, curve);
        }
        std::filesystem::rename(tmp, req.output);
    }
    if (!req.sidecar.empty()) {
        std::ofstream file(req.sidecar);
        if (!file) throw Error("cannot write '" + req.sidecar + "'");
        write_sidecar(file, curve);
    }
}

int cmd_simulate(const RunFlags& f, SimMode mode, std::ostream& out, std::ostream& err) {
    std::vector<RunRequest> runs;
    try {
        runs = requests_from_flags(f, mode);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        for (const auto& req : runs) {
            RunHooks hooks;
            if (!f.quiet) {
                hooks.progress = [&](std::size_t i, std::uint64_t n, std::uint64_t events) {
                    err << req.name << ": " << req.config.snr_grid_db[i] << " dB, " << n << " realizations, "
                        << events << " events\n";
                };
            }
            const ResultCurve curve = run(req.config, hooks);
            write_outputs(req, curve, out);
        }
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

struct DmtFlags {
    std::string protocol;
    std::size_t antennas = 2;
    std::size_t frame_length = 15;
    std::size_t sources = 2;
    std::string out;
    std::string fit;
    std::string window;
    std::string at;
};

int cmd_dmt(const DmtFlags& f, std::ostream& out, std::ostream& err) {
    std::ostringstream body;
    try {
        if (!f.fit.empty()) {
            std::ifstream in(f.fit);
            if (!in) throw ConfigError("cannot open '" + f.fit + "'");
            const auto points = read_csv(in);
            auto window = top_window(points);
            if (!f.window.empty()) {
                const auto colon = f.window.find(':');
                if (colon == std::string::npos) throw ConfigError("--window must be low:high in dB");
                window = {parse_rational(f.window.substr(0, colon)), parse_rational(f.window.substr(colon + 1))};
            }
            const auto fit = estimate_diversity(points, window.first, window.second);
            body << "# window_db: " << window.first << ':' << window.second << '\n';
            body << "slope,std_error,points\n" << fit.slope << ',' << fit.std_error << ',' << fit.points << '\n';
        } else {
            std::vector<Protocol> protocols;
            if (f.protocol.empty()) {
                protocols = {Protocol::Direct, Protocol::StandardStbc, Protocol::RepetitionConcurrent,
                             Protocol::SuperpositionConcurrent, Protocol::MSourceSuperposition};
            } else {
                protocols = {parse_protocol(f.protocol)};
            }
            std::vector<DmtCurve> curves;
            for (auto p : protocols) curves.push_back(dmt_curve(p, f.antennas, f.frame_length, f.sources));
            body.precision(12);
            body << "# relaysim " << kVersion << " dmt N=" << f.antennas << " L=" << f.frame_length
                 << " M=" << f.sources << '\n';
            for (std::size_t i = 0; i < curves.size(); ++i) {
                for (std::size_t j = i + 1; j < curves.size(); ++j) {
                    for (double r : crossover_points(curves[i], curves[j])) {
                        body << "# crossover " << to_string(curves[i].protocol) << '/' << to_string(curves[j].protocol)
                             << ": r=" << r << '\n';
                    }
                }
            }
            if (!f.at.empty()) {
                const double r = parse_rational(f.at);
                body << "protocol,r,d\n";
                for (const auto& c : curves) body << to_string(c.protocol) << ',' << r << ',' << c.at(r) << '\n';
            } else {
                body << "protocol,r,d\n";
                for (const auto& c : curves) {
                    for (const auto& [r, d] : c.breakpoints) body << to_string(c.protocol) << ',' << r << ',' << d << '\n';
                }
            }
        }
    } catch (const EstimationError& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (f.out.empty() || f.out == "-") {
        out << body.str();
    } else {
        std::ofstream file(f.out);
        if (!file) {
            err << "runtime error: cannot write '" << f.out << "'\n";
            return kExitRuntime;
        }
        file << body.str();
    }
    return kExitOk;
}

int cmd_validate(const ValidationOptions& options, std::ostream& out) {
    const auto results = run_validation(options);
    bool ok = true;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << " (" << r.detail << ')';
        out << '\n';
        ok = ok && r.passed;
    }
    out << (ok ? "all checks passed\n" : "validation failed\n");
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Link-level simulator for two-relay concurrent decode-and-forward networks", "relaysim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunFlags outage_flags;
    auto* outage = app.add_subcommand("outage", "Monte-Carlo outage probability");
    add_run_flags(outage, outage_flags, SimMode::Outage);

    RunFlags ber_flags;
    auto* ber = app.add_subcommand("ber", "Monte-Carlo bit error rate of the uncoded chain");
    add_run_flags(ber, ber_flags, SimMode::Ber);

    DmtFlags dmt_flags;
    auto* dmt = app.add_subcommand("dmt", "Theoretical DMT breakpoints, or a slope fit of a curve CSV");
    dmt->add_option("--protocol", dmt_flags.protocol, "Single protocol (all when omitted)");
    dmt->add_option("-N,--N", dmt_flags.antennas, "Destination antennas")->check(CLI::PositiveNumber);
    dmt->add_option("-L,--L", dmt_flags.frame_length, "Frame length")->check(CLI::PositiveNumber);
    dmt->add_option("-M,--M", dmt_flags.sources, "Sources")->check(CLI::PositiveNumber);
    dmt->add_option("--at", dmt_flags.at, "Evaluate every curve at this multiplexing gain");
    dmt->add_option("--fit", dmt_flags.fit, "Fit the diversity slope of a curve CSV");
    dmt->add_option("--window", dmt_flags.window, "Fit window low:high in dB (default: top 15 dB)");
    dmt->add_option("--out", dmt_flags.out, "Output path (stdout when omitted)");

    ValidationOptions validation;
    std::string inject;
    auto* validate = app.add_subcommand("validate", "Fast structural and oracle self-checks");
    validate->add_option("--seed", validation.seed, "Seed for randomized checks");
    validate->add_option("--instances", validation.oracle_instances, "Oracle instances per codeword count");
    validate->add_option("--inject", inject, "Inject a fault to exercise the checks")
        ->check(CLI::IsMember({"bad-scaling"}));

    unsigned table_order = 8;
    auto* table = app.add_subcommand("constellation", "Print a constellation table");
    table->add_option("--qam", table_order, "Order: 4, 8 or 16")->check(CLI::IsMember({4, 8, 16}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream text;
        const int code = app.exit(e, text, text);
        (code == 0 ? out : err) << text.str();
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (outage->parsed()) return cmd_simulate(outage_flags, SimMode::Outage, out, err);
    if (ber->parsed()) return cmd_simulate(ber_flags, SimMode::Ber, out, err);
    if (dmt->parsed()) return cmd_dmt(dmt_flags, out, err);
    if (validate->parsed()) {
        if (inject == "bad-scaling") validation.fault = InjectedFault::BadScaling;
        return cmd_validate(validation, out);
    }
    if (table->parsed()) {
        Constellation::qam(table_order).write_table(out);
        return kExitOk;
    }
    return kExitUsage;
}

}  // namespace relaysim::cli
