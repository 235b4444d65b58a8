#pragma once

#include <stdexcept>
#include <string>

namespace needlet {

// Invalid arguments, malformed configuration, contract violations. CLI exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameters outside the regime an analytic formula covers. CLI exit 3.
class RegimeError : public std::runtime_error {
public:
    explicit RegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Series or iteration failed to converge within its resource cap. CLI exit 4.
class TruncationError : public std::runtime_error {
public:
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace needlet
