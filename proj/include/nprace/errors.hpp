#pragma once

#include <stdexcept>
#include <string>

namespace nprace {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (s, y) outside the surface domain, or an argument outside a function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Degenerate tangents or |theta_p| too close to pi/2.
class RegularityError : public Error {
 public:
  using Error::Error;
};

/// (I - n II) singular or badly conditioned: the offset sits at a focal distance.
class OffsetSingularityError : public Error {
 public:
  using Error::Error;
};

/// Contact speed too low for the slip angle to be defined.
class LowSpeedError : public Error {
 public:
  using Error::Error;
};

/// Longitudinal tire force exceeds the available peak force.
class InfeasibleForceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message starts with the JSON field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, const std::string& what) : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Input parsed but failed a consistency or regularity check.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Newton or NLP iteration failed to converge.
class NonconvergenceError : public Error {
 public:
  using Error::Error;
};

/// Singular algebraic Jacobian: the DAE is not index 1 at this configuration.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Failure while building the collocation NLP.
class TranscriptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace nprace
