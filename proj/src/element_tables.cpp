#include "hdgflow/element_tables.hpp"

namespace hdgflow {

ElementTables build_element_tables(int k, double hx, double hy) {
  ElementTables t;
  t.k = k;
  t.m = (k + 1) * (k + 1);
  t.nf = k + 1;
  t.nq = k + 2;
  t.hx = hx;
  t.hy = hy;
  t.basis = gll_nodes(k);
  t.quad = gl_rule(t.nq);

  const int n1 = k + 1, nq = t.nq;

  // 1D nodal and derivative values at the quadrature points. Differentiating
  // the nodal identity data with the spectral matrix gives exact nodal values
  // of each l_a', interpolated at the quadrature points.
  const Eigen::MatrixXd D1 = diff_matrix(t.basis);
  t.L1.resize(n1, nq);
  t.D1q.resize(n1, nq);
  for (int a = 0; a < n1; ++a) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n1);
    e(a) = 1.0;
    const Eigen::VectorXd de = D1 * e;
    for (int q = 0; q < nq; ++q) {
      t.L1(a, q) = bary_eval(t.basis, e, t.quad.points(q));
      t.D1q(a, q) = bary_eval(t.basis, de, t.quad.points(q));
    }
  }
  t.l_mid.resize(n1);
  for (int a = 0; a < n1; ++a) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n1);
    e(a) = 1.0;
    t.l_mid(a) = bary_eval(t.basis, e, 0.0);
  }
  t.M1 = t.L1 * t.quad.weights.asDiagonal() * t.L1.transpose();

  const int Q = nq * nq;
  t.Phi.resize(t.m, Q);
  t.DPhiX.resize(t.m, Q);
  t.DPhiY.resize(t.m, Q);
  t.wVol.resize(Q);
  t.qXi.resize(Q);
  t.qEta.resize(Q);
  const double jac = 0.25 * hx * hy;
  for (int qy = 0; qy < nq; ++qy) {
    for (int qx = 0; qx < nq; ++qx) {
      const int q = qx + nq * qy;
      t.qXi(q) = t.quad.points(qx);
      t.qEta(q) = t.quad.points(qy);
      t.wVol(q) = t.quad.weights(qx) * t.quad.weights(qy) * jac;
      for (int b = 0; b < n1; ++b) {
        for (int a = 0; a < n1; ++a) {
          const int i = a + n1 * b;
          t.Phi(i, q) = t.L1(a, qx) * t.L1(b, qy);
          t.DPhiX(i, q) = (2.0 / hx) * t.D1q(a, qx) * t.L1(b, qy);
          t.DPhiY(i, q) = (2.0 / hy) * t.L1(a, qx) * t.D1q(b, qy);
        }
      }
    }
  }

  t.M = t.Phi * t.wVol.asDiagonal() * t.Phi.transpose();
  t.Gx = t.DPhiX * t.wVol.asDiagonal() * t.Phi.transpose();
  t.Gy = t.DPhiY * t.wVol.asDiagonal() * t.Phi.transpose();

  t.P2.resize(n1 * n1, nq);
  t.P2d.resize(n1 * n1, nq);
  for (int a2 = 0; a2 < n1; ++a2)
    for (int a = 0; a < n1; ++a)
      for (int q = 0; q < nq; ++q) {
        t.P2(a + n1 * a2, q) = t.L1(a, q) * t.L1(a2, q);
        t.P2d(a + n1 * a2, q) = t.D1q(a, q) * t.L1(a2, q);
      }

  for (int f = 0; f < 4; ++f) t.face_nodes[f].resize(n1);
  for (int b = 0; b < n1; ++b) {
    t.face_nodes[0][b] = 0 + n1 * b;  // left,  ordered by increasing y
    t.face_nodes[1][b] = k + n1 * b;  // right
  }
  for (int a = 0; a < n1; ++a) {
    t.face_nodes[2][a] = a;           // bottom, ordered by increasing x
    t.face_nodes[3][a] = a + n1 * k;  // top
  }
  const Eigen::MatrixXd M1ref = t.M1;
  for (int f = 0; f < 4; ++f) {
    const double len = (f < 2) ? hy : hx;
    t.Mf[f] = 0.5 * len * M1ref;
    t.wFace[f] = 0.5 * len * t.quad.weights;
  }
  return t;
}

namespace {

// Contract the x-pair table against W, then the y-pair table, and scatter
// the (a,a2)x(b,b2) result into volume ordering. Cost is O((k+1)^4 (k+2))
// instead of the O((k+1)^4 (k+2)^2) dense product.
void factorized_product(const ElementTables& t, const Eigen::MatrixXd& Px,
                        const Eigen::MatrixXd& Py, const Eigen::VectorXd& W, double scale,
                        Eigen::Ref<Eigen::MatrixXd> out) {
  const int n1 = t.k + 1, nq = t.nq;
  const Eigen::Map<const Eigen::MatrixXd> Wmat(W.data(), nq, nq);  // (qx, qy)
  const Eigen::MatrixXd T1 = Px * Wmat;            // (a,a2) x qy
  const Eigen::MatrixXd T2 = T1 * Py.transpose();  // (a,a2) x (b,b2)
  for (int b2 = 0; b2 < n1; ++b2)
    for (int b = 0; b < n1; ++b) {
      const int pc = b + n1 * b2;
      for (int a2 = 0; a2 < n1; ++a2)
        for (int a = 0; a < n1; ++a)
          out(a + n1 * b, a2 + n1 * b2) += scale * T2(a + n1 * a2, pc);
    }
}

}  // namespace

void add_weighted_mass(const ElementTables& t, const Eigen::VectorXd& W, double scale,
                       Eigen::Ref<Eigen::MatrixXd> out) {
  factorized_product(t, t.P2, t.P2, W, scale, out);
}

void add_weighted_advection(const ElementTables& t, const Eigen::VectorXd& Wx,
                            const Eigen::VectorXd& Wy, double scale,
                            Eigen::Ref<Eigen::MatrixXd> out) {
  factorized_product(t, t.P2d, t.P2, Wx, scale * 2.0 / t.hx, out);
  factorized_product(t, t.P2, t.P2d, Wy, scale * 2.0 / t.hy, out);
}

}  // namespace hdgflow
