#pragma once

#include <stdexcept>
#include <string>

namespace relcycle {

/// Base class for failures of a numerical procedure (as opposed to misuse).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive step size fell below the allowed minimum.
class StiffnessError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// SE(2) logarithm requested at a rotation of +-pi.
class BranchPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NewtonDivergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Shooting Jacobian is singular, i.e. a Floquet multiplier sits at 1.
class DegenerateCycle : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonPeriodicOrbit : public NumericalError {
public:
    NonPeriodicOrbit(const std::string& what, double residual)
        : NumericalError(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Distance to a cycle grew instead of decaying.
class BasinEscape : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An operation needed a symmetry descriptor the field does not carry.
class MissingSymmetry : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace relcycle
