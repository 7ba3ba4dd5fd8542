#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace igr {

/// Base class for every failure the solver reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveDensity : public Error {
 public:
  NonPositiveDensity(std::size_t cell, double value)
      : Error("non-positive density " + std::to_string(value) + " at cell " +
              std::to_string(cell)),
        cell_(cell),
        value_(value) {}
  std::size_t cell() const { return cell_; }
  double value() const { return value_; }

 private:
  std::size_t cell_;
  double value_;
};

class NonFiniteValue : public Error {
 public:
  explicit NonFiniteValue(std::size_t index)
      : Error("non-finite value at entry " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class SingularOperator : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual)
      : Error("conjugate gradient did not converge: " + std::to_string(iterations) +
              " iterations, relative residual " + std::to_string(residual)),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class PostShock : public Error {
 public:
  using Error::Error;
};

class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

class IncompatibleResolution : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration problems carry the offending key and, when read from a
/// file, the 1-based line number (0 for command-line values).
class ConfigError : public Error {
 public:
  enum class Kind { UnknownKey, TypeError, MissingRequired };

  ConfigError(Kind kind, std::string key, int line, const std::string& detail)
      : Error(describe(kind, key, line, detail)), kind_(kind), key_(std::move(key)), line_(line) {}

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string describe(Kind kind, const std::string& key, int line,
                              const std::string& detail) {
    std::string what;
    switch (kind) {
      case Kind::UnknownKey: what = "unknown key"; break;
      case Kind::TypeError: what = "invalid value for"; break;
      case Kind::MissingRequired: what = "missing required key"; break;
    }
    std::string msg = what + " '" + key + "'";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  Kind kind_;
  std::string key_;
  int line_;
};

}  // namespace igr
