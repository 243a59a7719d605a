#pragma once

#include <stdexcept>
#include <string>

namespace gammatail {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative method (series, continued fraction, bisection) failed to reach its tolerance.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature stopped before reaching the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    [[nodiscard]] double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Value outside the range an inverse map is defined on.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// No pair sum exceeds the threshold, so the ratio estimator is undefined.
class NoExceedanceError : public Error {
public:
    using Error::Error;
};

class SampleTooSmallError : public Error {
public:
    using Error::Error;
};

/// A Noether-type (or otherwise unconstrained) variance estimate came out negative.
class NegativeVarianceError : public Error {
public:
    NegativeVarianceError(const std::string& what, double value) : Error(what), value_(value) {}

    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double value_;
};

class AllResamplesDegenerateError : public Error {
public:
    using Error::Error;
};

class DegenerateLeaveOneOutError : public Error {
public:
    using Error::Error;
};

/// Input file could not be read or parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

class EmptyAfterFilterError : public Error {
public:
    using Error::Error;
};

}  // namespace gammatail
