#pragma once

#include <stdexcept>
#include <string>

namespace koopmon {

/// Bad or inconsistent user configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Anything that goes wrong while integrating (CLI exit code 2).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneratePesError : public SolverError {
 public:
  using SolverError::SolverError;
};

class GridCoverageError : public SolverError {
 public:
  using SolverError::SolverError;
};

class NonFiniteError : public SolverError {
 public:
  using SolverError::SolverError;
};

class EnergyDriftError : public SolverError {
 public:
  using SolverError::SolverError;
};

class DecompositionError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace koopmon
