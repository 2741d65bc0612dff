#pragma once

#include <stdexcept>
#include <string>

namespace tsq {

// Error taxonomy shared by all modules. Exit-code mapping lives in the CLI.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid/shape mismatch between operands.
struct ShapeError : Error {
  using Error::Error;
};

// Value outside the mathematical domain of an operation (non-finite node,
// square-well coordinate outside the well, ...).
struct DomainError : Error {
  using Error::Error;
};

// Parameter violates an operation precondition (anti-aliasing bound,
// degenerate arc interval, non-decreasing sigma list, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Interferometer graph is structurally invalid (cycle, bad port wiring).
struct TopologyError : Error {
  using Error::Error;
};

// A state's support is not captured by the grid.
struct TruncationError : Error {
  using Error::Error;
};

// Closed or blocked interferometer path used where an open one is required.
struct PathError : Error {
  using Error::Error;
};

// Scenario configuration is invalid.
struct ConfigError : Error {
  using Error::Error;
};

// Filesystem failure while emitting outputs.
struct IoError : Error {
  using Error::Error;
};

}  // namespace tsq
