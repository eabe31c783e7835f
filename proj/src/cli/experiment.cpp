#include "relaysim/cli/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "relaysim/error.hpp"

namespace relaysim::cli {

namespace {

double parse_number(std::string_view text, const char* what) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(std::string("invalid ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

template <typename T>
T get_unsigned(const nlohmann::json& run, const char* key, T fallback) {
    if (!run.contains(key)) return fallback;
    const auto& v = run.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
    return v.get<T>();
}

double get_real(const nlohmann::json& v, const char* key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw ConfigError(std::string("'") + key + "' must be a number or a string like \"1/6\"");
}

const std::set<std::string> kRunKeys = {
    "name", "command", "protocol", "L", "M", "N", "sp_mode", "r", "rate", "snr_db", "trials", "min_events",
    "max_trials", "seed", "workers", "batch_size", "qam", "output", "sidecar", "exhaustive", "source"};
const std::set<std::string> kTopKeys = {"seed", "workers", "runs"};

RunRequest parse_run(const nlohmann::json& run, SimMode mode, std::uint64_t seed, std::size_t workers,
                     std::size_t index) {
    if (!run.is_object()) throw ConfigError("run " + std::to_string(index) + " is not an object");
    for (const auto& [key, value] : run.items()) {
        if (!kRunKeys.count(key)) throw ConfigError("run " + std::to_string(index) + ": unknown key '" + key + "'");
    }
    RunRequest req;
    req.name = run.value("name", "run" + std::to_string(index));
    if (run.contains("command")) {
        const auto cmd = run.at("command").get<std::string>();
        if (cmd != to_string(mode)) {
            throw ConfigError("run '" + req.name + "' is a " + cmd + " run, not " + std::string(to_string(mode)));
        }
    }
    if (!run.contains("protocol")) throw ConfigError("run '" + req.name + "': missing 'protocol'");
    if (!run.contains("snr_db")) throw ConfigError("run '" + req.name + "': missing 'snr_db'");
    if (!run.contains("output") || !run.at("output").is_string()) {
        throw ConfigError("run '" + req.name + "': missing 'output' path");
    }

    SimConfig& c = req.config;
    c.mode = mode;
    try {
        c.spec.protocol = parse_protocol(run.at("protocol").get<std::string>());
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    c.spec.frame_length = get_unsigned<std::size_t>(run, "L", 1);
    c.spec.sources = get_unsigned<std::size_t>(run, "M", 2);
    c.spec.antennas = get_unsigned<std::size_t>(run, "N", 1);
    const auto sp_mode = get_unsigned<int>(run, "sp_mode", 1);
    if (sp_mode != 1 && sp_mode != 2) throw ConfigError("'sp_mode' must be 1 or 2");
    c.spec.mode = sp_mode == 1 ? SuperpositionMode::Mode1Sum : SuperpositionMode::Mode2Xor;

    const auto& grid = run.at("snr_db");
    if (grid.is_string()) {
        c.snr_grid_db = parse_snr_grid(grid.get<std::string>());
    } else if (grid.is_array()) {
        for (const auto& v : grid) {
            if (!v.is_number()) throw ConfigError("'snr_db' array must hold numbers");
            c.snr_grid_db.push_back(v.get<double>());
        }
    } else {
        throw ConfigError("'snr_db' must be \"start:step:stop\" or an array");
    }

    if (run.contains("r") && run.contains("rate")) throw ConfigError("give either 'r' or 'rate', not both");
    if (run.contains("rate")) {
        c.rate = RateTarget::fixed(get_real(run.at("rate"), "rate"));
    } else if (run.contains("r")) {
        c.rate = RateTarget::multiplexing(get_real(run.at("r"), "r"));
    } else if (mode == SimMode::Outage) {
        throw ConfigError("outage run '" + req.name + "' needs 'r' or 'rate'");
    }
    c.trials = get_unsigned<std::uint64_t>(run, "trials", c.trials);
    c.min_events = get_unsigned<std::uint64_t>(run, "min_events", c.min_events);
    c.max_trials = get_unsigned<std::uint64_t>(run, "max_trials", c.max_trials);
    c.batch_size = get_unsigned<std::uint64_t>(run, "batch_size", c.batch_size);
    c.seed = get_unsigned<std::uint64_t>(run, "seed", seed);
    c.workers = get_unsigned<std::size_t>(run, "workers", workers);
    if (run.contains("qam")) c.constellation.order_override = get_unsigned<unsigned>(run, "qam", 4);
    if (run.contains("exhaustive")) {
        if (!run.at("exhaustive").is_boolean()) throw ConfigError("'exhaustive' must be true or false");
        if (run.at("exhaustive").get<bool>()) c.outage.search = SubsetSearch::Exhaustive;
    }
    if (run.contains("source")) {
        const auto source = get_unsigned<int>(run, "source", 1);
        if (source < 1) throw ConfigError("'source' is 1-based");
        c.outage_source = source - 1;
    }
    req.output = run.at("output").get<std::string>();
    if (run.contains("sidecar")) req.sidecar = run.at("sidecar").get<std::string>();

    try {
        c.validate();
    } catch (const ParameterError& e) {
        throw ConfigError("run '" + req.name + "': " + e.what());
    }
    return req;
}

}  // namespace

std::vector<double> parse_snr_grid(std::string_view text) {
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        const auto first = text.find(':');
        const auto second = text.find(':', first + 1);
        if (second == std::string_view::npos) throw ConfigError("SNR grid must look like start:step:stop");
        const double start = parse_number(text.substr(0, first), "SNR start");
        const double step = parse_number(text.substr(first + 1, second - first - 1), "SNR step");
        const double stop = parse_number(text.substr(second + 1), "SNR stop");
        if (!(step > 0.0)) throw ConfigError("SNR step must be positive");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    } else {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            grid.push_back(parse_number(piece, "SNR value"));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
    }
    if (grid.empty()) throw ConfigError("SNR grid '" + std::string(text) + "' has no points");
    return grid;
}

double parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_number(text, "number");
    const double num = parse_number(text.substr(0, slash), "numerator");
    const double den = parse_number(text.substr(slash + 1), "denominator");
    if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

std::vector<RunRequest> parse_experiment(const nlohmann::json& doc, SimMode mode) {
    if (!doc.is_object()) throw ConfigError("experiment document must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (!kTopKeys.count(key)) throw ConfigError("unknown top-level key '" + key + "'");
    }
    if (!doc.contains("runs") || !doc.at("runs").is_array() || doc.at("runs").empty()) {
        throw ConfigError("experiment needs a non-empty 'runs' array");
    }
    const auto seed = get_unsigned<std::uint64_t>(doc, "seed", 1);
    const auto workers = get_unsigned<std::size_t>(doc, "workers", 1);
    std::vector<RunRequest> runs;
    std::size_t index = 0;
    for (const auto& run : doc.at("runs")) {
        try {
            runs.push_back(parse_run(run, mode, seed, workers, index++));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("experiment: ") + e.what());
        }
    }
    return runs;
}

std::vector<RunRequest> load_experiment(const std::string& path, SimMode mode) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_experiment(doc, mode);
}

}  // namespace relaysim::cli
