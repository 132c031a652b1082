#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace jini {

// Base class for all library errors so callers can catch jini::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / usage errors: bad specs, incompatible model-estimator
// pairs, malformed input files.  These indicate caller mistakes.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class IncompatibleSpec : public ConfigError {
 public:
  explicit IncompatibleSpec(const std::string& msg) : ConfigError(msg) {}
};

// File or stream could not be opened, read, or parsed.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class EmptyData : public ConfigError {
 public:
  explicit EmptyData(const std::string& msg) : ConfigError(msg) {}
};

// Numerical failures that abort a computation and carry no usable result.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

class NonFiniteLikelihood : public NumericalError {
 public:
  explicit NonFiniteLikelihood(const std::string& msg) : NumericalError(msg) {}
};

class HeavyTail : public NumericalError {
 public:
  explicit HeavyTail(const std::string& msg) : NumericalError(msg) {}
};

class DegenerateResponse : public NumericalError {
 public:
  explicit DegenerateResponse(const std::string& msg) : NumericalError(msg) {}
};

class AllWeightsZero : public NumericalError {
 public:
  explicit AllWeightsZero(const std::string& msg) : NumericalError(msg) {}
};

class SingularInformation : public NumericalError {
 public:
  explicit SingularInformation(const std::string& msg) : NumericalError(msg) {}
};

class DegenerateVariance : public NumericalError {
 public:
  explicit DegenerateVariance(const std::string& msg) : NumericalError(msg) {}
};

class RankDeficient : public NumericalError {
 public:
  explicit RankDeficient(const std::string& msg) : NumericalError(msg) {}
};

// Raised when more than the tolerated share of inner fits fail during a
// simulated moment evaluation.
class TooManyFailures : public NumericalError {
 public:
  TooManyFailures(const std::string& msg, int failures, int total)
      : NumericalError(msg), failures(failures), total(total) {}
  int failures;
  int total;
};

// Raised when the iterative-bootstrap residual blows up even after the
// automatic damping retry.  Carries the last iterate for diagnostics.
class Divergence : public NumericalError {
 public:
  Divergence(const std::string& msg, Eigen::VectorXd last)
      : NumericalError(msg), last_iterate(std::move(last)) {}
  Eigen::VectorXd last_iterate;
};

}  // namespace jini
