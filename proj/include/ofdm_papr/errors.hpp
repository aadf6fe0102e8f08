#pragma once

#include <stdexcept>
#include <string>

namespace ofdm_papr {

// Input for which the requested quantity is undefined (zero-energy symbol).
class degenerate_input : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A solver could not complete; carries the iteration where it happened
// (0 when raised outside an iteration loop).
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, int iteration = 0)
        : std::runtime_error(iteration > 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                                           : what),
          iteration_(iteration)
    {
    }

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

// Bad experiment configuration (maps to CLI exit code 2).
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace ofdm_papr
