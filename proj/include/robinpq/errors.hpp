#pragma once

#include <stdexcept>
#include <string>

namespace robinpq {

struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a Neumann solve is requested for a source with nonzero mean.
struct IncompatibleSourceError : SolverError {
  explicit IncompatibleSourceError(const std::string& what) : SolverError(what) {}
};

// Thrown when the incompatibility prefactor is requested for a zero-mean source.
struct CompatibleSourceError : std::runtime_error {
  explicit CompatibleSourceError(const std::string& what) : std::runtime_error(what) {}
};

struct NonfiniteEnergyError : SolverError {
  explicit NonfiniteEnergyError(const std::string& what) : SolverError(what) {}
};

struct RegimeMismatchError : std::runtime_error {
  explicit RegimeMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyWindowError : std::runtime_error {
  explicit EmptyWindowError(const std::string& what) : std::runtime_error(what) {}
};

struct OracleError : std::runtime_error {
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robinpq
