#pragma once

#include <stdexcept>
#include <string>

namespace hdgflow {

/// Nonpositive or otherwise inadmissible physical coefficient encountered
/// during assembly (e.g. mu <= 0 at a quadrature point).
struct CoefficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A dense factorization hit a pivot below tolerance.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The global skeleton solve failed (typically a missing pressure pin).
struct SolverSingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well or lens region does not line up with element boundaries.
struct MisalignedRegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad values in an input data file (raster, config).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally malformed input file.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hdgflow
