#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace irj {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the admissible range of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter vector or matrix with inconsistent size.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// C_k^T C_k is singular (or numerically so) for the named model.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

/// Residual norm of an exact fit is zero: the closed-form evidence diverges.
class InfiniteEvidenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. Row and column are 1-based; 0 means "not applicable".
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Optimiser stopped without reaching the stationarity tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   double gradient_norm)
      : Error(what), last_iterate_(std::move(last_iterate)), gradient_norm_(gradient_norm) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::vector<double> last_iterate_;
  double gradient_norm_;
};

/// Reference computation refused (enumeration bound, too few effective draws, ...).
class OracleError : public Error {
 public:
  using Error::Error;
};

class LowEssError : public OracleError {
 public:
  LowEssError(const std::string& what, std::vector<std::string> offending)
      : OracleError(what), offending_(std::move(offending)) {}
  const std::vector<std::string>& offending() const noexcept { return offending_; }

 private:
  std::vector<std::string> offending_;
};

}  // namespace irj
