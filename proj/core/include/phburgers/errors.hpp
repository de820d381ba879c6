#ifndef PHBURGERS_ERRORS_HPP
#define PHBURGERS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace phb {

//! Invalid user-supplied configuration (mesh size, run parameters, grid).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

//! Malformed command-line or table input.
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

//! Why a time step could not be completed.
enum class FailureReason {
    none,
    newton_divergence,
    singular_weighted_mass,
    dt_underflow,
};

const char* to_string(FailureReason reason);

//! Raised by a nonlinear or constitutive solve that cannot complete the
//! current step. The time-step controller catches it and retries.
class StepFailure : public std::runtime_error
{
public:
    StepFailure(FailureReason reason, const std::string& what)
    : std::runtime_error(what)
    , reason_(reason)
    {}

    FailureReason reason() const noexcept { return reason_; }

private:
    FailureReason reason_;
};

//! An oracle was asked for a value outside its domain of validity.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

//! The initial profile is nowhere decreasing, so no shock ever forms.
class NoShockError : public DomainError
{
public:
    using DomainError::DomainError;
};

//! No developed front in the sampled profile.
class NoFrontError : public DomainError
{
public:
    using DomainError::DomainError;
};

} // namespace phb

#endif
