#pragma once

#include <stdexcept>
#include <string>

namespace robustmc {

// Exit codes used by the CLI: 2 config, 3 numeric, 4 contract.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a kernel is evaluated outside its valid regime, e.g. the
// martingale binomial kernel with a step size so large that the up/down
// sign condition fails.
struct InvalidKernelError : NumericError {
    explicit InvalidKernelError(const std::string& msg) : NumericError(msg) {}
};

struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace robustmc
