#pragma once

#include <stdexcept>
#include <string>

namespace collab {

// Base for everything the library can throw deliberately. Callers that want
// exit-code discipline catch this; anything else is a programming error.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration: unknown keys, out-of-range parameters, missing files.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed input data: syntax errors, duplicate ids, empty member lists.
class IngestError : public Error {
  public:
    explicit IngestError(const std::string& what) : Error(what) {}
};

// An estimator was asked to run on fewer observations than it supports.
class InsufficientDataError : public Error {
  public:
    explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

// An iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
  public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// Two series that must share a year axis do not.
class AlignmentError : public Error {
  public:
    explicit AlignmentError(const std::string& what) : Error(what) {}
};

// A year or interval fell outside the data's coverage.
class RangeError : public Error {
  public:
    explicit RangeError(const std::string& what) : Error(what) {}
};

// A sample is degenerate for the requested fit (e.g. all values equal the
// lower cutoff of a power law).
class DegenerateDistributionError : public Error {
  public:
    explicit DegenerateDistributionError(const std::string& what) : Error(what) {}
};

}  // namespace collab
