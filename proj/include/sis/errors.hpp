#ifndef SIS_ERRORS_HPP
#define SIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sis {

// Raised when inputs violate a model invariant (negative rates, bad
// dimensions, malformed files). CLI maps this to exit code 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when an iteration fails to reach its tolerance (integrator
// overshoot, equilibrium stall). CLI maps this to exit code 3.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sis

#endif
