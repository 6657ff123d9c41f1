#pragma once

#include <stdexcept>
#include <string>

namespace gnwaves {

/// Parameter outside the admissible box, or a formula evaluated at a pole.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// NaN or infinity found in a field.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Fourier multiplier vanished on some resolved mode.
class SingularMultiplierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Layer depth dropped below the floor h_min.
class DepthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative elliptic solve hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// Max norm crossed the blow-up threshold. Carries the time it happened.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Two fields that must share a grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gnwaves
