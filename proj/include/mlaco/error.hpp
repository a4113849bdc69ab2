#pragma once

#include <stdexcept>
#include <string>

namespace mlaco {

// Base class for all toolkit errors. Subclasses exist so callers can
// distinguish bad input data from bad arguments or degenerate numerics.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed instance/model/manifest files. Messages name the offending
// line or field.
class ParseError : public Error {
public:
    using Error::Error;
};

// A structurally valid instance that admits no feasible route, or an
// operation applied to such an instance.
class InfeasibleInstanceError : public Error {
public:
    using Error::Error;
};

// Bad dimensions, out-of-range vertex indices, inconsistent options.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// Sample sets with zero objective variance; statistical measures are
// undefined on them.
class DegenerateSamplesError : public Error {
public:
    using Error::Error;
};

// Training data containing a single class.
class DegenerateLabelsError : public Error {
public:
    using Error::Error;
};

// Non-finite loss during training.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// No instance of a labeling batch could be solved to optimality.
class EmptyTrainingSetError : public Error {
public:
    using Error::Error;
};

}  // namespace mlaco
