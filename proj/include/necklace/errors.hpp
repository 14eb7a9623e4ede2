#pragma once

#include <stdexcept>
#include <string>

namespace necklace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input polygon has too few distinct vertices for the requested operation.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A cyclic polygon has an edge through the centre of its circumcircle.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// Computed quantities disagree beyond tolerance (e.g. winding not integral).
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// Malformed necklace instance or polygon/necklace size mismatch.
class InstanceError : public Error {
public:
    using Error::Error;
};

/// The necklace violates the realisability inequalities.
class NotRealisableError : public InstanceError {
public:
    using InstanceError::InstanceError;
};

/// Side-length functions are not differentiable (some side has length zero).
class NonDifferentiableError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a function (e.g. radius below the minimum).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Configuration is singular; the tangent space has the wrong dimension.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Polygon is not a critical point of oriented area.
class NotCriticalError : public Error {
public:
    using Error::Error;
};

/// Morse index formula requested at a bifurcating or non-admissible point.
class UndefinedIndexError : public Error {
public:
    using Error::Error;
};

/// Side-length chart on cyclic polygons degenerates (bifurcating input).
class ChartDegeneracyError : public Error {
public:
    using Error::Error;
};

/// A definiteness statement that must hold at a critical point failed.
class LemmaViolationError : public Error {
public:
    using Error::Error;
};

}  // namespace necklace
