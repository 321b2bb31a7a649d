#include "hdgflow/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgflow {

namespace {

// Legendre P_n(x) and its first derivative by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) {
    p = p0;
    dp = d0;
    return;
  }
  for (int m = 2; m <= n; ++m) {
    const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
    const double d2 = d0 + (2.0 * m - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  p = p1;
  dp = d1;
}

}  // namespace

NodalBasis gll_nodes(int k) {
  if (k < 1) throw std::invalid_argument("gll_nodes: degree k must be >= 1 (trace space needs two nodes per direction)");
  const int n = k + 1;
  Eigen::VectorXd x(n);
  x(0) = -1.0;
  x(n - 1) = 1.0;
  // Interior GLL nodes are the roots of P_k'. Newton iteration with
  // Chebyshev-Lobatto starting guesses converges in a handful of steps
  // up to k = 16 and beyond.
  for (int i = 1; i < n - 1; ++i) {
    double xi = -std::cos(M_PI * i / k);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(k, xi, p, dp);
      // f = P_k'(x); f' = P_k''(x) = (2 x P_k' - k(k+1) P_k) / (1 - x^2)
      const double f = dp;
      const double fp = (2.0 * xi * dp - k * (k + 1.0) * p) / (1.0 - xi * xi);
      const double step = f / fp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x(i) = xi;
  }
  // Enforce exact symmetry about 0.
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (x(n - 1 - i) - x(i));
    x(i) = -v;
    x(n - 1 - i) = v;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;

  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) prod *= (x(i) - x(j));
    }
    w(i) = 1.0 / prod;
  }
  w /= w.cwiseAbs().maxCoeff();  // scale-invariant; keeps weights O(1)

  NodalBasis b;
  b.k = k;
  b.nodes = x;
  b.bary_weights = w;
  return b;
}

QuadratureRule gl_rule(int n) {
  if (n < 1) throw std::invalid_argument("gl_rule: point count must be >= 1");
  Eigen::VectorXd x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev guess for the i-th root of P_n, then Newton.
    double xi = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, xi, p, dp);
      const double step = p / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    legendre(n, xi, p, dp);
    x(i) = xi;
    x(n - 1 - i) = -xi;
    w(i) = 2.0 / ((1.0 - xi * xi) * dp * dp);
    w(n - 1 - i) = w(i);
  }
  if (n % 2 == 1) {
    x(n / 2) = 0.0;
    double p, dp;
    legendre(n, 0.0, p, dp);
    w(n / 2) = 2.0 / (dp * dp);
  }
  QuadratureRule r;
  r.n = n;
  r.points = x;
  r.weights = w;
  return r;
}

double bary_eval(const NodalBasis& basis, const Eigen::VectorXd& nodal_values, double x) {
  const int n = basis.num_nodes();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x - basis.nodes(i);
    if (std::abs(d) < 1e-14) return nodal_values(i);
    const double r = basis.bary_weights(i) / d;
    num += r * nodal_values(i);
    den += r;
  }
  return num / den;
}

Eigen::MatrixXd diff_matrix(const NodalBasis& basis) {
  const int n = basis.num_nodes();
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (basis.bary_weights(j) / basis.bary_weights(i)) /
                (basis.nodes(i) - basis.nodes(j));
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

double tensor_eval(const NodalBasis& basis, const Eigen::MatrixXd& coeffs, double x, double y) {
  const int n = basis.num_nodes();
  Eigen::VectorXd line(n);
  for (int b = 0; b < n; ++b) line(b) = bary_eval(basis, coeffs.col(b), x);
  return bary_eval(basis, line, y);
}

Eigen::Vector2d tensor_diff(const NodalBasis& basis, const Eigen::MatrixXd& coeffs, double x,
                            double y) {
  const int n = basis.num_nodes();
  const Eigen::MatrixXd D = diff_matrix(basis);
  // Differentiating nodal data with D yields the nodal values of the
  // (exact) derivative polynomial, which is then interpolated.
  const Eigen::MatrixXd dx_coeffs = D * coeffs;
  const Eigen::MatrixXd dy_coeffs = coeffs * D.transpose();
  Eigen::Vector2d g;
  Eigen::VectorXd line(n);
  for (int b = 0; b < n; ++b) line(b) = bary_eval(basis, dx_coeffs.col(b), x);
  g(0) = bary_eval(basis, line, y);
  for (int b = 0; b < n; ++b) line(b) = bary_eval(basis, dy_coeffs.col(b), x);
  g(1) = bary_eval(basis, line, y);
  return g;
}

}  // namespace hdgflow
