#pragma once

#include <stdexcept>
#include <string>

namespace olidtk {

// Root of the toolkit's exception hierarchy. The CLI maps the broad
// categories onto exit codes: ConfigError -> 2, DataError -> 3,
// NumericError (and anything else) -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

// --- corpus ---

struct MalformedRow : DataError {
  MalformedRow(const std::string& source, size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": malformed row: " + what),
        line(line) {}
  size_t line;
};

struct UnknownLabel : DataError {
  UnknownLabel(const std::string& source, size_t line, const std::string& value)
      : DataError(source + ":" + std::to_string(line) + ": unknown label '" + value + "'"),
        line(line) {}
  size_t line;
};

struct HierarchyViolation : DataError {
  HierarchyViolation(const std::string& source, size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": label hierarchy violated: " + what),
        line(line) {}
  size_t line;
};

struct TooFewExamples : DataError {
  using DataError::DataError;
};

// --- features ---

struct EmptyCorpus : DataError {
  using DataError::DataError;
};

struct DimensionMismatch : DataError {
  DimensionMismatch(const std::string& source, size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": dimension mismatch: " + what),
        line(line) {}
  size_t line;
};

struct ParseError : DataError {
  ParseError(const std::string& source, size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line(line) {}
  size_t line;
};

// --- sampling / models ---

struct EmptyClass : DataError {
  using DataError::DataError;
};

struct TooFewMinoritySamples : DataError {
  using DataError::DataError;
};

// SMOTE interpolates in a dense feature space; callers must densify sparse
// rows first or fall back to random oversampling.
struct SparseUnsupported : ConfigError {
  using ConfigError::ConfigError;
};

struct NonFiniteLoss : NumericError {
  using NumericError::NumericError;
};

// --- eval ---

struct LengthMismatch : DataError {
  using DataError::DataError;
};

struct UnknownClass : DataError {
  using DataError::DataError;
};

struct EmptyMatrix : DataError {
  using DataError::DataError;
};

// --- persistence ---

struct CorruptArtifact : DataError {
  using DataError::DataError;
};

struct VersionMismatch : DataError {
  using DataError::DataError;
};

}  // namespace olidtk
