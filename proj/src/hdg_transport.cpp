#include "hdgflow/hdg_transport.hpp"

#include <cmath>
#include <string>

#include "hdgflow/errors.hpp"
#include "hdgflow/parallel.hpp"

namespace hdgflow {

namespace {

inline void face_quad_point(const Face& f, double t, double& x, double& y) {
  if (f.vertical) {
    x = f.x0;
    y = 0.5 * (f.y0 + f.y1) + 0.5 * (f.y1 - f.y0) * t;
  } else {
    y = f.y0;
    x = 0.5 * (f.x0 + f.x1) + 0.5 * (f.x1 - f.x0) * t;
  }
}

}  // namespace

namespace {

// Constant-across-elements pieces of the transport matrices on a uniform
// mesh: the gradient couplings and the q.n face masses. Everything touched
// by D(u)^{-1}, the convection field, or tau is filled per element.
struct TransportConstBlocks {
  Eigen::MatrixXd Kee0, Kef0, Kfe0;
  Eigen::VectorXd intPhi;
};

TransportConstBlocks build_transport_const(const ElementTables& t, const QuadMesh& mesh) {
  const int m = t.m, nf = t.nf;
  TransportConstBlocks c;
  c.Kee0 = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  c.Kef0 = Eigen::MatrixXd::Zero(3 * m, 4 * nf);
  c.Kfe0 = Eigen::MatrixXd::Zero(4 * nf, 3 * m);
  c.intPhi = t.Phi * t.wVol;

  c.Kee0.block(0, 2 * m, m, m) = -t.Gx;
  c.Kee0.block(m, 2 * m, m, m) = -t.Gy;
  c.Kee0.block(2 * m, 0, m, m) = -t.Gx;
  c.Kee0.block(2 * m, m, m, m) = -t.Gy;

  const auto& uses = mesh.element_faces[0];
  for (int f = 0; f < 4; ++f) {
    const double s = uses[f].sign;
    const auto& fn = t.face_nodes[f];
    const Eigen::MatrixXd& Mf = t.Mf[f];
    const int ucomp = (f < 2) ? 0 : 1;
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        const double mf = Mf(a, b);
        c.Kee0(2 * m + fn[a], ucomp * m + fn[b]) += s * mf;  // q.n in the scalar row
        c.Kef0(ucomp * m + fn[a], f * nf + b) += s * mf;     // c_hat in the flux row
        c.Kfe0(f * nf + a, ucomp * m + fn[b]) += s * mf;     // q.n continuity row
      }
    }
  }
  return c;
}

// Everything that depends on the element state: dispersion, convection,
// time/production mass, tau-stabilized face couplings, and the RHS.
void fill_transport_element(const TransportProblem& prob, int e,
                            const TransportConstBlocks& ctx, TransportElementMatrices& em) {
  const ElementTables& t = *prob.tables;
  const QuadMesh& mesh = *prob.mesh;
  const int m = t.m, nf = t.nf, Q = t.num_quad();
  if (!(prob.dt > 0.0)) throw std::invalid_argument("assemble_transport_local: dt must be > 0");

  const Eigen::VectorXd ue = prob.velocity->col(e);
  const Eigen::VectorXd ux_q = t.Phi.transpose() * ue.head(m);
  const Eigen::VectorXd uy_q = t.Phi.transpose() * ue.tail(m);

  // D(u_h)^{-1} pointwise via the closed form.
  Eigen::VectorXd dxx(Q), dxy(Q), dyy(Q);
  for (int q = 0; q < Q; ++q) {
    const Eigen::Matrix2d Dinv =
        dispersion_tensor_inverse(*prob.fluid, Eigen::Vector2d(ux_q(q), uy_q(q)));
    dxx(q) = t.wVol(q) * Dinv(0, 0);
    dxy(q) = t.wVol(q) * Dinv(0, 1);
    dyy(q) = t.wVol(q) * Dinv(1, 1);
  }

  em.Kee = ctx.Kee0;
  em.Kef = ctx.Kef0;
  em.Kfe = ctx.Kfe0;
  em.Kff = Eigen::MatrixXd::Zero(4 * nf, 4 * nf);
  em.Rf = Eigen::VectorXd::Zero(4 * nf);

  add_weighted_mass(t, dxx, 1.0, em.Kee.block(0, 0, m, m));
  add_weighted_mass(t, dxy, 1.0, em.Kee.block(0, m, m, m));
  em.Kee.block(m, 0, m, m) = em.Kee.block(0, m, m, m);
  add_weighted_mass(t, dyy, 1.0, em.Kee.block(m, m, m, m));

  // volume c block: time mass + production mass - convection
  const double qp = prob.q_production.size() > 0 ? prob.q_production(e) : 0.0;
  const Eigen::VectorXd wux = t.wVol.cwiseProduct(ux_q);
  const Eigen::VectorXd wuy = t.wVol.cwiseProduct(uy_q);
  em.Kee.block(2 * m, 2 * m, m, m) += (prob.fluid->phi / prob.dt + qp) * t.M;
  add_weighted_advection(t, wux, wuy, -1.0, em.Kee.block(2 * m, 2 * m, m, m));

  const auto& uses = mesh.element_faces[e];
  for (int f = 0; f < 4; ++f) {
    const double s = uses[f].sign;
    const auto& fn = t.face_nodes[f];
    const Eigen::MatrixXd& Mf = t.Mf[f];
    const int ucomp = (f < 2) ? 0 : 1;

    // face trace of u from this element's side
    Eigen::VectorXd u_face_n(nf), u_face_t(nf);
    for (int l = 0; l < nf; ++l) {
      u_face_n(l) = ue(ucomp * m + fn[l]);
      u_face_t(l) = ue((1 - ucomp) * m + fn[l]);
    }
    // tau from the midpoint velocity of the owning side
    const double un_mid = t.l_mid.dot(u_face_n);
    const double ut_mid = t.l_mid.dot(u_face_t);
    const Eigen::Vector2d umid = (f < 2) ? Eigen::Vector2d(un_mid, ut_mid)
                                         : Eigen::Vector2d(ut_mid, un_mid);
    const Eigen::Vector2d nrm = (f < 2) ? Eigen::Vector2d(s, 0.0) : Eigen::Vector2d(0.0, s);
    const double tau = stabilization_tau(*prob.fluid, umid, nrm);
    em.tau[f] = tau;

    // (u.n_E) weighted face mass; u.n_E = s * (u . stored normal)
    Eigen::VectorXd un_q(t.nq);
    for (int q = 0; q < t.nq; ++q) {
      double v = 0.0;
      for (int l = 0; l < nf; ++l) v += u_face_n(l) * t.L1(l, q);
      un_q(q) = s * v;
    }
    const Eigen::MatrixXd Wun =
        t.L1 * (t.wFace[f].cwiseProduct(un_q)).asDiagonal() * t.L1.transpose();

    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        const double mf = Mf(a, b);
        em.Kee(2 * m + fn[a], 2 * m + fn[b]) += tau * mf;
        em.Kef(2 * m + fn[a], f * nf + b) += Wun(a, b) - tau * mf;
        em.Kfe(f * nf + a, 2 * m + fn[b]) += tau * mf;
        em.Kff(f * nf + a, f * nf + b) += Wun(a, b) - tau * mf;
      }
    }
  }

  // right-hand side: time term plus source
  em.Re.setZero(3 * m);
  em.Re.segment(2 * m, m).noalias() = (prob.fluid->phi / prob.dt) * (t.M * prob.c_prev->col(e));
  if (prob.source_fn) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    Eigen::VectorXd fw(Q);
    for (int q = 0; q < Q; ++q)
      fw(q) = t.wVol(q) * prob.source_fn(t.qx_phys(cx, q), t.qy_phys(cy, q));
    em.Re.segment(2 * m, m) += t.Phi * fw;
  } else if (prob.q_injection.size() > 0) {
    em.Re.segment(2 * m, m) += (prob.q_injection(e) * prob.cbar) * ctx.intPhi;
  }
}

}  // namespace

TransportElementMatrices assemble_transport_local(const TransportProblem& prob, int e) {
  const TransportConstBlocks ctx = build_transport_const(*prob.tables, *prob.mesh);
  TransportElementMatrices em;
  fill_transport_element(prob, e, ctx, em);
  return em;
}

TransportCondensed condense_transport(const TransportProblem& prob) {
  const QuadMesh& mesh = *prob.mesh;
  const ElementTables& t = *prob.tables;
  const int ne = mesh.num_elements(), nf = t.nf;

  TransportCondensed out;
  out.recovery.resize(ne);
  std::vector<Eigen::MatrixXd> He(ne);
  std::vector<Eigen::VectorXd> Fe(ne);

  const TransportConstBlocks ctx = build_transport_const(t, mesh);
  parallel_for(ne, [&](int e) {
    TransportElementMatrices em;
    fill_transport_element(prob, e, ctx, em);
    DenseLU lu;
    try {
      lu.factor(em.Kee);
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("condense_transport: singular interior block on element " +
                                std::to_string(e));
    }
    ElementRecovery& rec = out.recovery[e];
    rec.Y = lu.solve(em.Kef);
    rec.x2 = lu.solve(em.Re);
    He[e] = em.Kff - em.Kfe * rec.Y;
    Fe[e] = em.Rf - em.Kfe * rec.x2;
  });

  CondensedSystem& sys = out.system;
  sys.trace_per_face = nf;
  sys.n_trace = mesh.num_faces() * nf;
  sys.rhs = Eigen::VectorXd::Zero(sys.n_trace);
  sys.triplets.reserve(static_cast<size_t>(ne) * 16 * nf * nf);
  for (int e = 0; e < ne; ++e) {
    const auto& uses = mesh.element_faces[e];
    for (int fa = 0; fa < 4; ++fa) {
      const int ga = uses[fa].face * nf;
      for (int a = 0; a < nf; ++a) sys.rhs(ga + a) += Fe[e](fa * nf + a);
      for (int fb = 0; fb < 4; ++fb) {
        const int gb = uses[fb].face * nf;
        for (int a = 0; a < nf; ++a)
          for (int b = 0; b < nf; ++b)
            sys.triplets.emplace_back(ga + a, gb + b, He[e](fa * nf + a, fb * nf + b));
      }
    }
  }

  if (prob.bc.kind == TransportBC::Kind::Dirichlet) {
    for (int f = 0; f < mesh.num_faces(); ++f) {
      if (!mesh.faces[f].boundary) continue;
      const Eigen::VectorXd vals = project_face(mesh, t, f, prob.bc.dirichlet);
      for (int l = 0; l < nf; ++l) sys.constraints.emplace_back(f * nf + l, vals(l));
    }
  }
  return out;
}

void recover_transport(const TransportCondensed& condensed, const ElementTables& t,
                       const QuadMesh& mesh, const Eigen::VectorXd& chat, Eigen::MatrixXd& q,
                       Eigen::MatrixXd& c) {
  const int ne = mesh.num_elements(), m = t.m, nf = t.nf;
  q.resize(2 * m, ne);
  c.resize(m, ne);
  parallel_for(ne, [&](int e) {
    Eigen::VectorXd tr(4 * nf);
    const auto& uses = mesh.element_faces[e];
    for (int f = 0; f < 4; ++f) tr.segment(f * nf, nf) = chat.segment(uses[f].face * nf, nf);
    const Eigen::VectorXd x = condensed.recovery[e].x2 - condensed.recovery[e].Y * tr;
    q.col(e) = x.head(2 * m);
    c.col(e) = x.tail(m);
  });
}

TransportSolution transport_step(const TransportProblem& prob, CondensedSolver* cache) {
  const TransportCondensed condensed = condense_transport(prob);
  TransportSolution sol;
  sol.chat = solve_condensed(condensed.system, cache);
  recover_transport(condensed, *prob.tables, *prob.mesh, sol.chat, sol.q, sol.c);
  return sol;
}

void project_initial_condition(const QuadMesh& mesh, const ElementTables& t,
                               const std::function<double(double, double)>& c0,
                               Eigen::MatrixXd& c, Eigen::VectorXd& chat) {
  const int ne = mesh.num_elements(), m = t.m, Q = t.num_quad();
  c.resize(m, ne);
  const Eigen::LLT<Eigen::MatrixXd> mass(t.M);
  for (int e = 0; e < ne; ++e) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    Eigen::VectorXd fw(Q);
    for (int q = 0; q < Q; ++q) fw(q) = t.wVol(q) * c0(t.qx_phys(cx, q), t.qy_phys(cy, q));
    c.col(e) = mass.solve(t.Phi * fw);
  }
  chat.resize(mesh.num_faces() * t.nf);
  for (int f = 0; f < mesh.num_faces(); ++f)
    chat.segment(f * t.nf, t.nf) = project_face(mesh, t, f, c0);
}

Eigen::VectorXd transport_flux_moments(const TransportProblem& prob,
                                       const TransportSolution& sol, int e, int face) {
  const ElementTables& t = *prob.tables;
  const QuadMesh& mesh = *prob.mesh;
  const auto& uses = mesh.element_faces[e];
  int lf = -1;
  for (int f = 0; f < 4; ++f)
    if (uses[f].face == face) lf = f;
  if (lf < 0) throw std::out_of_range("transport_flux_moments: face not on element");
  const int nf = t.nf, m = t.m;
  const double s = uses[lf].sign;
  const int ucomp = (lf < 2) ? 0 : 1;
  const auto& fn = t.face_nodes[lf];

  // recompute tau exactly as the assembly did
  const Eigen::VectorXd ue = prob.velocity->col(e);
  Eigen::VectorXd u_face_n(nf), u_face_t(nf);
  for (int l = 0; l < nf; ++l) {
    u_face_n(l) = ue(ucomp * m + fn[l]);
    u_face_t(l) = ue((1 - ucomp) * m + fn[l]);
  }
  const double un_mid = t.l_mid.dot(u_face_n);
  const double ut_mid = t.l_mid.dot(u_face_t);
  const Eigen::Vector2d umid =
      (lf < 2) ? Eigen::Vector2d(un_mid, ut_mid) : Eigen::Vector2d(ut_mid, un_mid);
  const Eigen::Vector2d nrm = (lf < 2) ? Eigen::Vector2d(s, 0.0) : Eigen::Vector2d(0.0, s);
  const double tau = stabilization_tau(*prob.fluid, umid, nrm);

  // moments of (q.n_hat + s tau (c - c_hat) + (u.n_hat) c_hat) against the
  // trace basis; single-valued fluxes give equal moments from both sides
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(nf);
  for (int q = 0; q < t.nq; ++q) {
    double qn = 0.0, cv = 0.0, ch = 0.0, un = 0.0;
    for (int l = 0; l < nf; ++l) {
      qn += sol.q(ucomp * m + fn[l], e) * t.L1(l, q);
      cv += sol.c(fn[l], e) * t.L1(l, q);
      ch += sol.chat(face * nf + l) * t.L1(l, q);
      un += u_face_n(l) * t.L1(l, q);
    }
    const double flux = qn + s * tau * (cv - ch) + un * ch;
    for (int l = 0; l < nf; ++l) mom(l) += t.wFace[lf](q) * flux * t.L1(l, q);
  }
  return mom;
}

BalanceResult transport_global_balance(const TransportProblem& prob,
                                       const TransportSolution& sol) {
  const ElementTables& t = *prob.tables;
  const QuadMesh& mesh = *prob.mesh;
  const Eigen::VectorXd intPhi = t.Phi * t.wVol;  // integrals of the basis functions
  BalanceResult r;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double time_term =
        prob.fluid->phi / prob.dt * intPhi.dot(sol.c.col(e) - prob.c_prev->col(e));
    const double qp = prob.q_production.size() > 0 ? prob.q_production(e) : 0.0;
    const double qi = prob.q_injection.size() > 0 ? prob.q_injection(e) : 0.0;
    const double prod = qp * intPhi.dot(sol.c.col(e));
    const double inj = qi * prob.cbar * mesh.element_area();
    r.residual += time_term + prod - inj;
    r.scale += std::abs(time_term) + std::abs(prod) + std::abs(inj);
  }
  return r;
}

}  // namespace hdgflow
