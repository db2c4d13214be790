#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ugr {

// Input data could not be read or does not satisfy the dataset schema.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header-level problem: a missing, duplicated or unexpected column.
class SchemaError : public DataError {
 public:
  SchemaError(const std::string& column, const std::string& what)
      : DataError(what), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// A single data row failed to parse. `row` is 1-based and counts data rows
// only (the header is not row 1).
class RowError : public DataError {
 public:
  RowError(std::size_t row, const std::string& column, const std::string& what)
      : DataError("row " + std::to_string(row) + (column.empty() ? "" : ", column '" + column + "'") +
                  ": " + what),
        row_(row),
        column_(column) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Fitting, scoring or (de)serializing a model failed.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ugr
