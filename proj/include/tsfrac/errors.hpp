#pragma once

#include <stdexcept>
#include <string>

// Exception taxonomy for the whole library. Every message is prefixed with the
// module that raised it so CLI users can tell a config mistake from a numeric
// failure without a stack trace.

namespace tsfrac {

class Error : public std::runtime_error {
public:
    Error(const std::string& module, const std::string& message)
        : std::runtime_error(module + ": " + message) {}
};

// --- time scale ---

class EmptyTimeScale : public Error {
public:
    explicit EmptyTimeScale(const std::string& msg)
        : Error("timescale", msg) {}
};

class PointNotInScale : public Error {
public:
    PointNotInScale(double t, const std::string& context)
        : Error("timescale", "point " + std::to_string(t) + " is not in the scale (" + context + ")") {}
};

class NotInKappa : public Error {
public:
    explicit NotInKappa(double t)
        : Error("timescale", "point " + std::to_string(t) +
                             " is a left-scattered maximum; delta derivatives are undefined there") {}
};

// --- expression language ---

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& msg)
        : Error("expr", msg + " at position " + std::to_string(position)), position(position) {}
    std::size_t position;
};

class UnknownIdentifier : public Error {
public:
    explicit UnknownIdentifier(const std::string& name)
        : Error("expr", "unknown identifier '" + name + "'") {}
};

class ArityMismatch : public Error {
public:
    ArityMismatch(const std::string& fn, std::size_t expected, std::size_t got)
        : Error("expr", "function '" + fn + "' expects " + std::to_string(expected) +
                        " argument(s), got " + std::to_string(got)) {}
};

class UndeclaredVariable : public Error {
public:
    explicit UndeclaredVariable(const std::string& name)
        : Error("expr", "variable '" + name + "' is not in the declared signature") {}
};

class DomainError : public Error {
public:
    DomainError(const std::string& what_failed, const std::string& subexpr)
        : Error("expr", what_failed + " in subexpression '" + subexpr + "'") {}
};

// --- calculus / quadrature ---

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg)
        : Error("calculus", msg) {}
};

class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& msg)
        : Error("quadrature", msg) {}
};

class NotIncreasing : public Error {
public:
    explicit NotIncreasing(const std::string& msg)
        : Error("calculus", msg) {}
};

// --- fractional operators / solver ---

class NonMonotoneWeight : public Error {
public:
    explicit NonMonotoneWeight(const std::string& msg)
        : Error("fracops", msg) {}
};

class ZeroWeightDerivative : public Error {
public:
    explicit ZeroWeightDerivative(double t)
        : Error("fracops", "weight derivative z^Delta vanishes at t = " + std::to_string(t) +
                           " (|z^Delta| <= 1e-12); generalized derivative undefined") {}
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(const std::string& msg)
        : Error("solver", msg) {}
};

class ScaleHasContinuousPart : public Error {
public:
    explicit ScaleHasContinuousPart(const std::string& msg)
        : Error("oracle", msg) {}
};

// --- configuration / CLI ---

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg)
        : Error("config", msg) {}
};

} // namespace tsfrac
