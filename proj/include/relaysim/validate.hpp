#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relaysim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

enum class InjectedFault {
    None,
    BadScaling,  // perturbs one relay amplitude in every schedule
};

struct ValidationOptions {
    std::uint64_t seed = 7;
    std::uint64_t oracle_instances = 2000;  // per codeword count
    InjectedFault fault = InjectedFault::None;
};

// Fast structural and oracle self-checks; each result names the check.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

}  // namespace relaysim
