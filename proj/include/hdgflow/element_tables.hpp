#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "hdgflow/basis.hpp"
#include "hdgflow/mesh.hpp"

namespace hdgflow {

/// Reference-element tables shared by every element of a uniform mesh and by
/// both HDG discretizations. Volume basis index i = a + (k+1)*b for the
/// tensor function l_a(xi) l_b(eta); quadrature index q = qx + nq*qy.
/// Trace functions on a face are the 1D GLL nodal functions parametrized by
/// the increasing coordinate, which is also the order of the volume nodes
/// restricted to that face -- no orientation flips are needed anywhere.
struct ElementTables {
  int k = 0;    ///< polynomial degree
  int m = 0;    ///< (k+1)^2 volume functions
  int nf = 0;   ///< k+1 trace functions per face
  int nq = 0;   ///< 1D quadrature points (k+2)
  double hx = 0.0, hy = 0.0;

  NodalBasis basis;
  QuadratureRule quad;

  // 1D tables
  Eigen::MatrixXd L1;      ///< (k+1) x nq nodal values l_a(x_q)
  Eigen::MatrixXd D1q;     ///< (k+1) x nq derivative values l_a'(x_q)
  Eigen::VectorXd l_mid;   ///< (k+1) values l_a(0)
  Eigen::MatrixXd M1;      ///< (k+1)^2 reference 1D mass on [-1,1]

  // volume tables, Q = nq^2 points
  Eigen::MatrixXd Phi;     ///< m x Q values
  Eigen::MatrixXd DPhiX;   ///< m x Q physical d/dx
  Eigen::MatrixXd DPhiY;   ///< m x Q physical d/dy
  Eigen::VectorXd wVol;    ///< Q physical quadrature weights
  Eigen::VectorXd qXi, qEta;  ///< Q reference coordinates

  // constant volume blocks
  Eigen::MatrixXd M;       ///< mass (m x m)
  Eigen::MatrixXd Gx;      ///< (d phi_i/dx, phi_j)
  Eigen::MatrixXd Gy;      ///< (d phi_i/dy, phi_j)

  // 1D basis-pair tables for sum-factorized weighted integrals
  Eigen::MatrixXd P2;      ///< (k+1)^2 x nq: l_a(x_q) l_a2(x_q) at row a + (k+1) a2
  Eigen::MatrixXd P2d;     ///< (k+1)^2 x nq: l_a'(x_q) l_a2(x_q)

  // faces, local order 0=left 1=right 2=bottom 3=top
  std::array<std::vector<int>, 4> face_nodes;  ///< volume indices on each face
  std::array<Eigen::MatrixXd, 4> Mf;           ///< scaled face mass (k+1)^2
  std::array<Eigen::VectorXd, 4> wFace;        ///< scaled face quadrature weights

  int num_quad() const { return nq * nq; }

  /// Physical coordinates of volume quadrature point q in element (cx, cy).
  double qx_phys(double cx, int q) const { return cx + 0.5 * hx * qXi(q); }
  double qy_phys(double cy, int q) const { return cy + 0.5 * hy * qEta(q); }
};

/// Build tables for degree k on elements of size hx x hy with k+2 quadrature
/// points per direction.
ElementTables build_element_tables(int k, double hx, double hy);

/// Global trace DOF of local node l on face f: f*(k+1)+l.
inline int trace_dof(const ElementTables& t, int face, int l) { return face * t.nf + l; }

/// out += scale * Phi diag(W) Phi^T by sum factorization; W holds the
/// pointwise weight times the physical quadrature weight, indexed like wVol.
void add_weighted_mass(const ElementTables& t, const Eigen::VectorXd& W, double scale,
                       Eigen::Ref<Eigen::MatrixXd> out);

/// out(j,i) += scale * sum_q [Wx(q) dPhiX(j,q) + Wy(q) dPhiY(j,q)] Phi(i,q),
/// the convection pairing (phi_i, u . grad phi_j) when Wx, Wy carry u times
/// the quadrature weights.
void add_weighted_advection(const ElementTables& t, const Eigen::VectorXd& Wx,
                            const Eigen::VectorXd& Wy, double scale,
                            Eigen::Ref<Eigen::MatrixXd> out);

}  // namespace hdgflow
