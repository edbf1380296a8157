#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Field/grid shape mismatch between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Metric lost positive definiteness (det below cutoff or g_tt <= 0).
class DefinitenessError : public Error {
public:
  using Error::Error;
};

/// Invalid parameter value (outside its admissible range).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A capability the operation needs is absent from the data
/// (e.g. tensor-valued second fundamental form not available).
class CapabilityError : public Error {
public:
  using Error::Error;
};

/// Input data is too coarse for the requested operation.
class ResolutionError : public Error {
public:
  using Error::Error;
};

/// A graph function left the coordinate range of the background,
/// reported with the offending node indices.
class ExitedDomainError : public Error {
public:
  ExitedDomainError(const std::string& what, std::vector<std::size_t> nodes)
      : Error(what), nodes_(std::move(nodes)) {}
  const std::vector<std::size_t>& nodes() const { return nodes_; }

private:
  std::vector<std::size_t> nodes_;
};

/// Transport along the rays blew up; carries the last usable parameter value.
class FocalPointError : public Error {
public:
  FocalPointError(const std::string& what, double lambda_last)
      : Error(what), lambda_last_(lambda_last) {}
  double lambda_last() const { return lambda_last_; }

private:
  double lambda_last_;
};

/// The base slice fails the expansion positivity the gauge construction needs.
class NotANullConeError : public Error {
public:
  using Error::Error;
};

/// Time step underflowed the configured minimum.
class StiffnessError : public Error {
public:
  using Error::Error;
};

/// The initial surface fails the strict un-trapped precondition,
/// reported with the offending node indices.
class PreconditionError : public Error {
public:
  PreconditionError(const std::string& what, std::vector<std::size_t> nodes)
      : Error(what), nodes_(std::move(nodes)) {}
  const std::vector<std::size_t>& nodes() const { return nodes_; }

private:
  std::vector<std::size_t> nodes_;
};

/// Reparametrization cannot be represented on the requested output grid.
class ReparametrizationError : public Error {
public:
  using Error::Error;
};

/// Configuration file / command line problems, aggregated.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::vector<std::string> details)
      : Error(what), details_(std::move(details)) {}
  explicit ConfigError(const std::string& what) : Error(what) {}
  const std::vector<std::string>& details() const { return details_; }

private:
  std::vector<std::string> details_;
};

/// File format / parse problems in snapshots and tabulated inputs.
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace nullflow
