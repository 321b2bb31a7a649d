#include "hdgflow/linalg.hpp"

#include <cmath>

#include "hdgflow/errors.hpp"

namespace hdgflow {

void DenseLU::factor(const Eigen::MatrixXd& A) {
  rowscale_ = A.cwiseAbs().rowwise().maxCoeff();
  if (A.rows() == 0 || rowscale_.minCoeff() <= 0.0)
    throw SingularMatrixError("DenseLU: matrix has a zero row");
  rowscale_ = rowscale_.cwiseInverse();
  lu_.compute(rowscale_.asDiagonal() * A);
  const Eigen::VectorXd d = lu_.matrixLU().diagonal().cwiseAbs();
  if (d.minCoeff() <= 1e-13 * d.maxCoeff())
    throw SingularMatrixError("DenseLU: pivot below tolerance, matrix is singular");
}

Eigen::VectorXd dense_lu_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  DenseLU lu(A);
  return lu.solve(b);
}

SparseMat sparse_assemble(int n, const std::vector<Triplet>& triplets) {
  SparseMat A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd sparse_lu_solve(const SparseSystem& system) {
  if (system.n == 0) return Eigen::VectorXd();
  const SparseMat A = sparse_assemble(system.n, system.triplets);
  Eigen::SparseLU<SparseMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverSingularError("sparse_lu_solve: factorization failed (singular system)");
  Eigen::VectorXd x = lu.solve(system.rhs);
  const double resid = (A * x - system.rhs).norm();
  if (!(resid <= 1e-10 * (system.rhs.norm() + 1.0)))
    throw SolverSingularError("sparse_lu_solve: residual " + std::to_string(resid) +
                              " exceeds tolerance; system may be singular");
  return x;
}

Eigen::VectorXd SkeletonSolver::factor_and_solve(const SparseMat& A, const Eigen::VectorXd& b) {
  if (A.rows() == 0) return Eigen::VectorXd();
  if (!analyzed_ || pattern_n_ != A.rows() || pattern_nnz_ != A.nonZeros()) {
    lu_.analyzePattern(A);
    analyzed_ = true;
    pattern_n_ = A.rows();
    pattern_nnz_ = A.nonZeros();
  }
  lu_.factorize(A);
  if (lu_.info() != Eigen::Success)
    throw SolverSingularError("SkeletonSolver: factorization failed (singular system)");
  Eigen::VectorXd x = lu_.solve(b);
  const double resid = (A * x - b).norm();
  if (!(resid <= 1e-10 * (b.norm() + 1.0)))
    throw SolverSingularError("SkeletonSolver: residual exceeds tolerance");
  return x;
}

}  // namespace hdgflow
