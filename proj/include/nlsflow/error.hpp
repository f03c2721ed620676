#pragma once

#include <stdexcept>
#include <string>

namespace nlsflow {

// Every failure carries the pipeline stage that raised it so run records can
// report where an experiment stopped.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class GridError : public Error {
 public:
  explicit GridError(const std::string& message) : Error("grid", message) {}
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& message) : Error("resolution", message) {}
};

// Raised by the steppers when a NaN appears or the mass tripwire fires.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, double time)
      : Error("solver", message + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class EnvelopeError : public Error {
 public:
  explicit EnvelopeError(const std::string& message) : Error("envelope", message) {}
};

class NormalizationError : public Error {
 public:
  explicit NormalizationError(const std::string& message) : Error("normalization", message) {}
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& message) : Error("metrics", message) {}
};

class ScatteringError : public Error {
 public:
  ScatteringError(const std::string& stage_tag, const std::string& message)
      : Error("scattering/" + stage_tag, message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class VerificationError : public Error {
 public:
  explicit VerificationError(const std::string& message) : Error("verify", message) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error("format", message) {}
};

}  // namespace nlsflow
