#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace univoque {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or semantically invalid configuration input (CLI exit code 2).
struct ConfigError : Error {
    std::vector<std::string> field_errors;

    explicit ConfigError(std::vector<std::string> errors)
        : Error(join(errors)), field_errors(std::move(errors)) {}
    explicit ConfigError(const std::string& msg) : Error(msg), field_errors{msg} {}

  private:
    static std::string join(const std::vector<std::string>& errors) {
        std::string out = "configuration error";
        for (const auto& e : errors) out += "\n  - " + e;
        return out;
    }
};

/// The provided (or suggested) box is not invariant under the system (CLI exit code 3).
struct InvariantBoxError : Error {
    using Error::Error;
};

/// A hard internal limit was hit (CLI exit code 4).
struct BudgetError : Error {
    using Error::Error;
};

}  // namespace univoque
