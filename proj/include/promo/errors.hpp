#ifndef PROMO_ERRORS_HPP
#define PROMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace promo {

/// Parameters outside the model's domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A grid or step too coarse for the requested discretization.
struct DiscretizationError : std::runtime_error {
    DiscretizationError(const std::string& what, int state)
        : std::runtime_error(what + " (state " + std::to_string(state) + ")"), state(state) {}
    int state;
};

/// Instance exceeds the exact or brute-force size limit.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Iteration cap, bracket failure or a non-monotone bisection target.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A policy callback returned an action that cannot be executed.
struct PolicyError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Malformed configuration or input document.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace promo

#endif // PROMO_ERRORS_HPP
