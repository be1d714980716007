#pragma once

#include <stdexcept>
#include <string>

namespace heatsift {

// CLI exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.
enum class ExitCode : int { ok = 0, usage = 2, data = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

// Bad flag/parameter values (sigma <= 0, negative t, ...).
class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& w) : Error(ExitCode::usage, w) {}
};

class DataError : public Error {
public:
  explicit DataError(const std::string& w) : Error(ExitCode::data, w) {}
};

// Malformed input row; carries a 1-based line number when known.
class ParseError : public DataError {
public:
  ParseError(const std::string& w, std::size_t line = 0)
      : DataError(line ? w + " (line " + std::to_string(line) + ")" : w), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// An identifier or index that does not resolve.
class ReferenceError : public DataError {
public:
  explicit ReferenceError(const std::string& w) : DataError(w) {}
};

class SizeError : public DataError {
public:
  explicit SizeError(const std::string& w) : DataError(w) {}
};

class ShapeError : public DataError {
public:
  explicit ShapeError(const std::string& w) : DataError(w) {}
};

class ConnectivityError : public DataError {
public:
  explicit ConnectivityError(const std::string& w) : DataError(w) {}
};

class ConfigError : public DataError {
public:
  explicit ConfigError(const std::string& w) : DataError(w) {}
};

class MetricError : public DataError {
public:
  explicit MetricError(const std::string& w) : DataError(w) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& w) : Error(ExitCode::numeric, w) {}
};

}  // namespace heatsift
