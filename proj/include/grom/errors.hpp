#pragma once

#include <stdexcept>
#include <string>

namespace grom {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rejected inputs: bad shapes, out-of-range parameters, inconsistent configs.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Numerical breakdown: cut locus, rank deficiency, degenerate spectra,
// diverging time integration.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

// Filesystem-level failures while reading or writing artifacts.
class StorageError : public Error {
public:
  explicit StorageError(const std::string& what) : Error(what) {}
};

// Malformed or mismatching on-disk content (bad magic, truncated payload,
// manifest inconsistencies).
class FormatError : public Error {
public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

}  // namespace grom
