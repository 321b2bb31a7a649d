#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

namespace hdgflow {

using Triplet = Eigen::Triplet<double>;
using SparseMat = Eigen::SparseMatrix<double>;

/// Dense LU with partial pivoting and an explicit singularity check. Rows
/// are equilibrated to unit max-norm before factoring, so blocks mixing very
/// different physical scales (velocity mass ~ mu/K against face masses ~ h)
/// factor reliably.
class DenseLU {
 public:
  DenseLU() = default;
  explicit DenseLU(const Eigen::MatrixXd& A) { factor(A); }

  /// Factor A; throws SingularMatrixError when a pivot of the equilibrated
  /// matrix falls below 1e-13 times the largest pivot magnitude.
  void factor(const Eigen::MatrixXd& A);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return lu_.solve(rowscale_.asDiagonal() * b);
  }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const {
    return lu_.solve(rowscale_.asDiagonal() * B);
  }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd rowscale_;
};

Eigen::VectorXd dense_lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Triplet-form sparse system with a right-hand side. Duplicate triplets
/// are summed once during compression.
struct SparseSystem {
  int n = 0;
  std::vector<Triplet> triplets;
  Eigen::VectorXd rhs;
};

/// Compress the triplets into CSC form.
SparseMat sparse_assemble(int n, const std::vector<Triplet>& triplets);

/// Direct sparse LU solve; residual-checked. Throws SolverSingularError.
Eigen::VectorXd sparse_lu_solve(const SparseSystem& system);

/// Sparse LU that analyzes the sparsity pattern once and refactorizes on
/// every call; used by the time loop where the pattern is fixed. Results are
/// identical to a fresh solve (the COLAMD ordering depends only on the
/// pattern).
class SkeletonSolver {
 public:
  /// Factor `A` (re-using the symbolic analysis when the pattern matches the
  /// previous call) and solve for b.
  Eigen::VectorXd factor_and_solve(const SparseMat& A, const Eigen::VectorXd& b);

 private:
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  int pattern_n_ = -1;
  long pattern_nnz_ = -1;
};

}  // namespace hdgflow
