#pragma once

#include <stdexcept>
#include <string>

namespace relaysim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid dimensions, ranges or arguments.
class ParameterError : public Error {
public:
    using Error::Error;
};

// A search space exceeds its configured limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Non-finite input or a failed factorization.
class ComputationError : public Error {
public:
    using Error::Error;
};

// Not enough usable points for a slope fit.
class EstimationError : public Error {
public:
    using Error::Error;
};

class MergeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ParameterError(message);
    }
}

}  // namespace relaysim
