#pragma once

#include <stdexcept>
#include <string>

namespace cvqkd {

/// A parameter lies outside the domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Homodyne conditioning on a quadrature with zero variance.
class DegenerateMeasurement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimal-attenuation radicand is non-positive: attenuation cannot raise the rate.
class NoPurificationGain : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A closed-form noise threshold has no positive value.
class NoPositiveThreshold : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The requested signal-to-noise ratio cannot be reached with 0 < T <= 1.
class InfeasibleSnr : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid sweep specification or CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvqkd
