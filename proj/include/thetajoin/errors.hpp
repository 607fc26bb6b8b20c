#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thetajoin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed relation header or schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A data row that does not conform to its schema. `row()` is 1-based and
// counts data rows only (the header is row 0).
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class EmptyRelationError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public QueryError {
 public:
  using QueryError::QueryError;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class PlanConsistencyError : public Error {
 public:
  using Error::Error;
};

class OracleGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace thetajoin
