#pragma once

#include <Eigen/Dense>

namespace hdgflow {

/// Degree-k nodal basis at the k+1 Gauss-Lobatto-Legendre points of [-1,1],
/// evaluated through barycentric interpolation of the second kind.
struct NodalBasis {
  int k = 0;                     ///< polynomial degree, k >= 1
  Eigen::VectorXd nodes;         ///< k+1 GLL points, strictly increasing, +-1 included
  Eigen::VectorXd bary_weights;  ///< barycentric weights (second kind), alternating sign

  int num_nodes() const { return k + 1; }
};

/// n-point Gauss-Legendre rule on [-1,1]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
  int n = 0;
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

/// GLL nodes and barycentric weights for degree k (k >= 1; throws otherwise).
NodalBasis gll_nodes(int k);

/// Gauss-Legendre rule with n points (n >= 1).
QuadratureRule gl_rule(int n);

/// Value at x of the nodal interpolant with the given nodal values.
/// x within 1e-14 of a node returns the nodal value directly.
double bary_eval(const NodalBasis& basis, const Eigen::VectorXd& nodal_values, double x);

/// Spectral differentiation matrix D with D(i,j) = l_j'(x_i).
Eigen::MatrixXd diff_matrix(const NodalBasis& basis);

/// Value of the tensor-product interpolant at (x,y) in [-1,1]^2.
/// coeffs(a,b) is the coefficient of l_a(x) l_b(y).
double tensor_eval(const NodalBasis& basis, const Eigen::MatrixXd& coeffs, double x, double y);

/// Reference-coordinate gradient (d/dx, d/dy) of the tensor-product interpolant.
Eigen::Vector2d tensor_diff(const NodalBasis& basis, const Eigen::MatrixXd& coeffs, double x,
                            double y);

}  // namespace hdgflow
