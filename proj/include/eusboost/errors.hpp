#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace eusboost {

/// Malformed or unusable input data: ragged rows, bad labels, non-finite cells.
/// Carries the offending row (and column, when known) for reporting.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what,
                       std::optional<std::size_t> row = std::nullopt,
                       std::optional<std::string> column = std::nullopt)
        : std::runtime_error(what), row_(row), column_(std::move(column)) {}

    std::optional<std::size_t> row() const { return row_; }
    const std::optional<std::string>& column() const { return column_; }

private:
    std::optional<std::size_t> row_;
    std::optional<std::string> column_;
};

/// A metric whose denominator is zero (e.g. sensitivity with no actual positives).
class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A computation that is well-formed but has nothing meaningful to produce:
/// a zero-mass subset, an all-zero paired difference, no usable boosting round.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Persisted model document that cannot be read back.
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedVersionError : public ModelFormatError {
public:
    using ModelFormatError::ModelFormatError;
};

}  // namespace eusboost
