#include "relaysim/cli/csv.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "relaysim/error.hpp"

namespace relaysim::cli {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string rate_text(const RateTarget& rate) {
    return (rate.kind == RateTarget::Kind::Multiplexing ? "multiplexing_gain=" : "fixed_rate_bits=") + fmt(rate.value);
}

}  // namespace

void write_csv(std::ostream& os, const ResultCurve& curve, bool with_timestamp) {
    const auto& c = curve.config;
    os << "# relaysim " << curve.code_version << '\n';
    os << "# mode: " << to_string(c.mode) << '\n';
    os << "# protocol: " << to_string(c.spec.protocol) << " L=" << c.spec.frame_length << " M=" << c.spec.sources
       << " N=" << c.spec.antennas << " sp_mode=" << (c.spec.mode == SuperpositionMode::Mode1Sum ? 1 : 2) << '\n';
    if (c.mode == SimMode::Outage) {
        os << "# rate: " << rate_text(c.rate) << '\n';
        os << "# scope: " << (c.outage_source < 0 ? std::string("all codewords") : "source " + std::to_string(c.outage_source + 1))
           << '\n';
        os << "# budget: trials=" << c.trials << " first_trial=" << c.first_trial << '\n';
    } else {
        os << "# modulation: " << c.constellation.order_for(c.spec.protocol) << "-QAM\n";
        os << "# budget: min_events=" << c.min_events << " max_trials=" << c.max_trials
           << " first_trial=" << c.first_trial << '\n';
    }
    os << "# seed: " << c.seed << " batch_size=" << c.batch_size << '\n';
    std::string low;
    for (const auto& p : curve.points) {
        if (p.low_confidence) low += (low.empty() ? "" : " ") + fmt(p.snr_db);
    }
    if (!low.empty()) os << "# low_confidence_snr_db: " << low << '\n';
    if (curve.cancelled) os << "# cancelled: true\n";
    if (with_timestamp) {
        os << "# generated: " << timestamp() << " wall_time_s=" << fmt(curve.wall_seconds) << '\n';
    }
    os << kCsvHeader << '\n';
    for (const auto& p : curve.points) {
        os << fmt(p.snr_db) << ',' << fmt(p.estimate) << ',' << fmt(p.ci_low) << ',' << fmt(p.ci_high) << ','
           << p.trials << ',' << p.events << '\n';
    }
}

void write_sidecar(std::ostream& os, const ResultCurve& curve) {
    const auto& c = curve.config;
    nlohmann::json j;
    j["code_version"] = curve.code_version;
    j["wall_seconds"] = curve.wall_seconds;
    j["cancelled"] = curve.cancelled;
    j["config"] = {
        {"mode", to_string(c.mode)},
        {"protocol", to_string(c.spec.protocol)},
        {"L", c.spec.frame_length},
        {"M", c.spec.sources},
        {"N", c.spec.antennas},
        {"sp_mode", c.spec.mode == SuperpositionMode::Mode1Sum ? 1 : 2},
        {"rate_kind", c.rate.kind == RateTarget::Kind::Multiplexing ? "multiplexing" : "fixed"},
        {"rate_value", c.rate.value},
        {"qam", c.constellation.order_for(c.spec.protocol)},
        {"snr_db", c.snr_grid_db},
        {"trials", c.trials},
        {"min_events", c.min_events},
        {"max_trials", c.max_trials},
        {"seed", c.seed},
        {"workers", c.workers},
        {"first_trial", c.first_trial},
        {"batch_size", c.batch_size},
        {"outage_source", c.outage_source < 0 ? nlohmann::json(nullptr) : nlohmann::json(c.outage_source + 1)},
    };
    auto& points = j["points"] = nlohmann::json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"snr_db", p.snr_db},
                          {"estimate", p.estimate},
                          {"ci_low", p.ci_low},
                          {"ci_high", p.ci_high},
                          {"trials", p.trials},
                          {"events", p.events},
                          {"realizations", p.realizations},
                          {"low_confidence", p.low_confidence}});
    }
    os << j.dump(2) << '\n';
}

std::vector<ResultPoint> read_csv(std::istream& is) {
    std::vector<ResultPoint> points;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kCsvHeader) throw ConfigError("curve CSV: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        std::istringstream row(line);
        ResultPoint p;
        char comma = 0;
        row >> p.snr_db >> comma >> p.estimate >> comma >> p.ci_low >> comma >> p.ci_high >> comma >> p.trials >>
            comma >> p.events;
        if (!row) throw ConfigError("curve CSV: malformed row '" + line + "'");
        p.realizations = p.trials;
        points.push_back(p);
    }
    if (!header) throw ConfigError("curve CSV: missing header row");
    return points;
}

}  // namespace relaysim::cli
