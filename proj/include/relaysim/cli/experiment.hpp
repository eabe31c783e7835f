#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relaysim/sim.hpp"

namespace relaysim::cli {

// "start:step:stop" (inclusive) or a comma-separated list, in dB.
std::vector<double> parse_snr_grid(std::string_view text);

// "1/6", "0.25" or "3".
double parse_rational(std::string_view text);

struct RunRequest {
    std::string name;
    SimConfig config;
    std::string output;   // CSV path
    std::string sidecar;  // optional JSON metadata path
};

// Experiment document:
//   { "seed": 1, "workers": 2,
//     "runs": [ { "name": "sup", "protocol": "superposition", "L": 2, "N": 2,
//                 "r": "1/6", "snr_db": "10:5:40", "trials": 100000,
//                 "output": "sup.csv" } ] }
// Every run is validated before anything executes; unknown keys are rejected.
// A run's "command" (outage or ber) defaults to `mode` and must match it.
std::vector<RunRequest> parse_experiment(const nlohmann::json& doc, SimMode mode);
std::vector<RunRequest> load_experiment(const std::string& path, SimMode mode);

}  // namespace relaysim::cli
