#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "hdgflow/linalg.hpp"

namespace hdgflow {

/// Globally coupled skeleton system in the trace unknowns, one (k+1)-block
/// per face; global trace DOF of node l on face f is f*(k+1)+l. Constrained
/// DOFs (Dirichlet data or a pressure pin) are eliminated at solve time:
/// their columns move to the right-hand side and their rows are dropped.
struct CondensedSystem {
  int n_trace = 0;          ///< (k+1) * number of faces
  int trace_per_face = 0;   ///< k+1
  std::vector<Triplet> triplets;
  Eigen::VectorXd rhs;
  std::vector<std::pair<int, double>> constraints;  ///< sorted by DOF index
  bool symmetric = false;  ///< caller-asserted; enables the Cholesky-type path

  int num_free() const { return n_trace - static_cast<int>(constraints.size()); }
};

/// Reusable skeleton solver for time loops. On first use it builds the
/// constraint reduction, the compressed sparsity pattern, a per-triplet
/// scatter map, and the fill-reducing ordering; later calls with the same
/// structure (verified entry by entry) only rewrite values and refactorize.
/// Constraint values and the right-hand side may change freely.
class CondensedSolver {
 public:
  CondensedSolver();
  ~CondensedSolver();
  CondensedSolver(CondensedSolver&&) noexcept;
  CondensedSolver& operator=(CondensedSolver&&) noexcept;

  /// Solve for the full trace vector (constrained entries carry their
  /// prescribed values). Throws SolverSingularError on failure.
  Eigen::VectorXd solve(const CondensedSystem& system);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper; `cache`, when given, makes repeated solves
/// with an identical structure cheap.
Eigen::VectorXd solve_condensed(const CondensedSystem& system, CondensedSolver* cache = nullptr);

/// Assembled reduced matrix (free DOFs only), mainly for inspection/tests.
SparseMat condensed_matrix(const CondensedSystem& system);

}  // namespace hdgflow
