#pragma once

#include <stdexcept>
#include <string>

namespace femmir {

/// Malformed or inconsistent input data (records, configs, lexicon files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line usage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that has no finite answer (e.g. no type-compatible
/// assignment, or a query with nothing to match).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace femmir
