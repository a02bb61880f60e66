#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crossings {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- tflang ---

class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& expected, const std::string& got)
        : Error("parse error at position " + std::to_string(position) + ": expected " + expected +
                ", got " + got),
          position(position),
          expected(expected) {}

    std::size_t position;
    std::string expected;
};

class DegreeError : public Error {
public:
    explicit DegreeError(const std::string& what) : Error(what) {}
};

// --- polycore ---

class ZeroPolynomialError : public Error {
public:
    ZeroPolynomialError() : Error("zero polynomial has no well-defined roots") {}
};

class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(const std::string& what) : Error(what) {}
};

// Raised when a computation cannot decide a sign because a root sits on (or
// numerically indistinguishable from) the imaginary axis.
class IndeterminateError : public Error {
public:
    explicit IndeterminateError(const std::string& what) : Error(what) {}
};

// --- contour ---

class IndentTooLargeError : public Error {
public:
    explicit IndentTooLargeError(const std::string& what) : Error(what) {}
};

class RadiusTooSmallError : public Error {
public:
    explicit RadiusTooSmallError(const std::string& what) : Error(what) {}
};

class RefinementBudgetError : public Error {
public:
    explicit RefinementBudgetError(const std::string& what) : Error(what) {}
};

// --- fresponse / nichols ---

class PoleProximityError : public Error {
public:
    explicit PoleProximityError(const std::string& what) : Error(what) {}
};

// The mapped curve passes through (or within tolerance of) the critical point.
// Carries the curve parameter where it happened.
class CriticalPointHitError : public Error {
public:
    CriticalPointHitError(double t, const std::string& what) : Error(what), t(t) {}
    double t;
};

// --- verdict ---

class MarginalPoleError : public Error {
public:
    explicit MarginalPoleError(const std::string& what) : Error(what) {}
};

// Bug trap: the independent crossing counts disagree. Never downgraded.
class MethodDisagreementError : public Error {
public:
    explicit MethodDisagreementError(const std::string& what) : Error(what) {}
};

}  // namespace crossings
