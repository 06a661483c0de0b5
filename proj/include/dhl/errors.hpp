#pragma once

#include <stdexcept>
#include <string>

namespace dhl {

/// A caller broke an operation's precondition (wrong k dimension, bad grid size, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Base of every physics-level failure. The CLI maps these to exit status 3.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters outside the region where the bosonized model has a normalizable ground state.
class ModelInvalid : public DomainError {
public:
    using DomainError::DomainError;
};

/// mu > 1: the system is in the normal phase, the macroscopic displacement is not real.
class SuperradiantFrameInvalid : public DomainError {
public:
    using DomainError::DomainError;
};

/// Closed-form result requested outside its range of validity (e.g. non-resonant frequencies).
class NotApplicable : public DomainError {
public:
    using DomainError::DomainError;
};

class UnstableSolution : public DomainError {
public:
    using DomainError::DomainError;
};

class BoundaryNotFound : public DomainError {
public:
    using DomainError::DomainError;
};

class NoStableSamples : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace dhl
