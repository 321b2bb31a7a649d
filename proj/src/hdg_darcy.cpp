#include "hdgflow/hdg_darcy.hpp"

#include <cmath>
#include <string>

#include "hdgflow/errors.hpp"
#include "hdgflow/parallel.hpp"

namespace hdgflow {

namespace {

// Physical coordinates of face quadrature point q on `face`.
inline void face_quad_point(const Face& f, double t, double& x, double& y) {
  if (f.vertical) {
    x = f.x0;
    y = 0.5 * (f.y0 + f.y1) + 0.5 * (f.y1 - f.y0) * t;
  } else {
    y = f.y0;
    x = 0.5 * (f.x0 + f.x1) + 0.5 * (f.x1 - f.x0) * t;
  }
}

// On a uniform mesh every element shares the same geometry and local face
// orientations, so everything except the weighted velocity mass block and
// the source is one constant set of matrices.
struct DarcyConstBlocks {
  Eigen::MatrixXd Kee0;  // G-blocks and face terms; velocity mass left zero
  Eigen::MatrixXd Kef, Kfe, Kff;
  Eigen::VectorXd intPhi;  // integrals of the volume basis functions
};

DarcyConstBlocks build_darcy_const(const ElementTables& t, const QuadMesh& mesh) {
  const int m = t.m, nf = t.nf;
  DarcyConstBlocks c;
  c.Kee0 = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  c.Kef = Eigen::MatrixXd::Zero(3 * m, 4 * nf);
  c.Kfe = Eigen::MatrixXd::Zero(4 * nf, 3 * m);
  c.Kff = Eigen::MatrixXd::Zero(4 * nf, 4 * nf);
  c.intPhi = t.Phi * t.wVol;

  // Both volume couplings are -(phi_j, d phi_i): the pressure gradient in
  // the momentum rows and -(u, grad w) in the flux row (integration by parts
  // plus the boundary terms below ties them together).
  c.Kee0.block(0, 2 * m, m, m) = -t.Gx;
  c.Kee0.block(m, 2 * m, m, m) = -t.Gy;
  c.Kee0.block(2 * m, 0, m, m) = -t.Gx;
  c.Kee0.block(2 * m, m, m, m) = -t.Gy;

  const auto& uses = mesh.element_faces[0];
  for (int f = 0; f < 4; ++f) {
    const double s = uses[f].sign;
    const auto& fn = t.face_nodes[f];
    const Eigen::MatrixXd& Mf = t.Mf[f];
    const int ucomp = (f < 2) ? 0 : 1;  // vertical faces couple u_x, horizontal u_y
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        const double mf = Mf(a, b);
        // u.n and (p - p_hat) trace terms of the flux equation
        c.Kee0(2 * m + fn[a], ucomp * m + fn[b]) += s * mf;
        c.Kee0(2 * m + fn[a], 2 * m + fn[b]) += mf;
        c.Kef(2 * m + fn[a], f * nf + b) -= mf;
        // p_hat coupling in the momentum equation
        c.Kef(ucomp * m + fn[a], f * nf + b) += s * mf;
        // flux-continuity rows
        c.Kfe(f * nf + a, ucomp * m + fn[b]) += s * mf;
        c.Kfe(f * nf + a, 2 * m + fn[b]) += mf;
        c.Kff(f * nf + a, f * nf + b) -= mf;
      }
    }
  }
  return c;
}

// Weighted velocity mass block plus source vector of one element.
void fill_darcy_element(const DarcyProblem& prob, int e, double lref,
                        const DarcyConstBlocks& ctx, Eigen::MatrixXd& Kee,
                        Eigen::VectorXd& Re) {
  const ElementTables& t = *prob.tables;
  const QuadMesh& mesh = *prob.mesh;
  const int m = t.m, Q = t.num_quad();

  const double Ke = (*prob.K)(e);
  if (!(Ke > 0.0))
    throw CoefficientError("assemble_darcy_local: nonpositive permeability on element " +
                           std::to_string(e));

  // Scaled inverse mobility mu(c_h)/K * pressure_scale at the quadrature
  // points, from the nodal expansion of c.
  const Eigen::VectorXd c_q = t.Phi.transpose() * prob.conc->col(e);
  Eigen::VectorXd coef(Q);
  for (int q = 0; q < Q; ++q) {
    const double mu = viscosity(*prob.fluid, c_q(q));
    if (!(mu > 0.0))
      throw CoefficientError("assemble_darcy_local: nonpositive viscosity at quadrature point");
    coef(q) = t.wVol(q) * lref * mu / Ke;
  }
  Kee = ctx.Kee0;
  add_weighted_mass(t, coef, 1.0, Kee.block(0, 0, m, m));
  Kee.block(m, m, m, m) = Kee.block(0, 0, m, m);

  Re.setZero(3 * m);
  if (prob.source_fn) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    Eigen::VectorXd fw(Q);
    for (int q = 0; q < Q; ++q)
      fw(q) = t.wVol(q) * prob.source_fn(t.qx_phys(cx, q), t.qy_phys(cy, q));
    Re.segment(2 * m, m).noalias() = t.Phi * fw;
  } else if (prob.source_const.size() > 0) {
    Re.segment(2 * m, m) = prob.source_const(e) * ctx.intPhi;
  }
}

void attach_constraints(const DarcyProblem& prob, CondensedSystem& sys) {
  const QuadMesh& mesh = *prob.mesh;
  const ElementTables& t = *prob.tables;
  if (prob.bc.kind == DarcyBC::Kind::Dirichlet) {
    const double lref = darcy_pressure_scale(prob);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      if (!mesh.faces[f].boundary) continue;
      const Eigen::VectorXd vals = lref * project_face(mesh, t, f, prob.bc.dirichlet);
      for (int l = 0; l < t.nf; ++l) sys.constraints.emplace_back(f * t.nf + l, vals(l));
    }
  } else {
    sys.constraints.emplace_back(0, 0.0);  // pressure pin; p defined up to a constant
  }
}

}  // namespace

double darcy_pressure_scale(const DarcyProblem& prob) {
  return prob.K->maxCoeff() / viscosity(*prob.fluid, 0.0);
}

Eigen::VectorXd project_face(const QuadMesh& mesh, const ElementTables& t, int face,
                             const std::function<double(double, double)>& g) {
  const Face& f = mesh.faces[face];
  Eigen::VectorXd b = Eigen::VectorXd::Zero(t.nf);
  for (int q = 0; q < t.nq; ++q) {
    double x, y;
    face_quad_point(f, t.quad.points(q), x, y);
    const double gw = g(x, y) * t.quad.weights(q);
    for (int l = 0; l < t.nf; ++l) b(l) += gw * t.L1(l, q);
  }
  return t.M1.ldlt().solve(b);
}

DarcyElementMatrices assemble_darcy_local(const DarcyProblem& prob, int e) {
  const DarcyConstBlocks ctx = build_darcy_const(*prob.tables, *prob.mesh);
  DarcyElementMatrices em;
  em.Kef = ctx.Kef;
  em.Kfe = ctx.Kfe;
  em.Kff = ctx.Kff;
  em.Rf = Eigen::VectorXd::Zero(4 * prob.tables->nf);
  fill_darcy_element(prob, e, darcy_pressure_scale(prob), ctx, em.Kee, em.Re);
  return em;
}

DarcyCondensed condense_darcy(const DarcyProblem& prob) {
  const QuadMesh& mesh = *prob.mesh;
  const ElementTables& t = *prob.tables;
  const int ne = mesh.num_elements(), nf = t.nf;
  const DarcyConstBlocks ctx = build_darcy_const(t, mesh);
  const double lref = darcy_pressure_scale(prob);

  DarcyCondensed out;
  out.recovery.resize(ne);
  std::vector<Eigen::MatrixXd> He(ne);
  std::vector<Eigen::VectorXd> Fe(ne);

  parallel_for(ne, [&](int e) {
    Eigen::MatrixXd Kee;
    Eigen::VectorXd Re;
    fill_darcy_element(prob, e, lref, ctx, Kee, Re);
    DenseLU lu;
    try {
      lu.factor(Kee);
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("condense_darcy: singular interior block on element " +
                                std::to_string(e));
    }
    ElementRecovery& rec = out.recovery[e];
    rec.Y = lu.solve(ctx.Kef);
    rec.x2 = lu.solve(Re);
    He[e].noalias() = ctx.Kff - ctx.Kfe * rec.Y;
    Fe[e] = -(ctx.Kfe * rec.x2);
  });

  CondensedSystem& sys = out.system;
  sys.trace_per_face = nf;
  sys.symmetric = true;  // flow skeleton operator is symmetric
  sys.n_trace = mesh.num_faces() * nf;
  sys.rhs = Eigen::VectorXd::Zero(sys.n_trace);
  sys.triplets.reserve(static_cast<size_t>(ne) * 16 * nf * nf);
  for (int e = 0; e < ne; ++e) {  // deterministic accumulation in element order
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
  attach_constraints(prob, sys);
  return out;
}

void recover_interior(const DarcyCondensed& condensed, const ElementTables& t,
                      const QuadMesh& mesh, const Eigen::VectorXd& phat, Eigen::MatrixXd& u,
                      Eigen::MatrixXd& p) {
  const int ne = mesh.num_elements(), m = t.m, nf = t.nf;
  u.resize(2 * m, ne);
  p.resize(m, ne);
  parallel_for(ne, [&](int e) {
    Eigen::VectorXd tr(4 * nf);
    const auto& uses = mesh.element_faces[e];
    for (int f = 0; f < 4; ++f) tr.segment(f * nf, nf) = phat.segment(uses[f].face * nf, nf);
    const Eigen::VectorXd x = condensed.recovery[e].x2 - condensed.recovery[e].Y * tr;
    u.col(e) = x.head(2 * m);
    p.col(e) = x.tail(m);
  });
}

DarcySolution darcy_solve(const DarcyProblem& prob, CondensedSolver* cache) {
  const DarcyCondensed condensed = condense_darcy(prob);
  DarcySolution sol;
  sol.pressure_scale = darcy_pressure_scale(prob);
  sol.phat_scaled = solve_condensed(condensed.system, cache);
  recover_interior(condensed, *prob.tables, *prob.mesh, sol.phat_scaled, sol.u, sol.p_scaled);
  return sol;
}

Eigen::VectorXd darcy_trace_flux(const ElementTables& t, const QuadMesh& mesh,
                                 const DarcySolution& sol, int e, int face) {
  const auto& uses = mesh.element_faces[e];
  int lf = -1;
  for (int f = 0; f < 4; ++f)
    if (uses[f].face == face) lf = f;
  if (lf < 0) throw std::out_of_range("darcy_trace_flux: face not on element");
  const int nf = t.nf, m = t.m;
  const double s = uses[lf].sign;
  const int ucomp = (lf < 2) ? 0 : 1;
  const auto& fn = t.face_nodes[lf];
  // u_hat.n_E = u.n_E + (P - P_hat); reported along the stored face normal.
  Eigen::VectorXd flux(t.nq);
  for (int q = 0; q < t.nq; ++q) {
    double un = 0.0, pv = 0.0, ph = 0.0;
    for (int l = 0; l < nf; ++l) {
      un += sol.u(ucomp * m + fn[l], e) * t.L1(l, q);
      pv += sol.p_scaled(fn[l], e) * t.L1(l, q);
      ph += sol.phat_scaled(face * nf + l) * t.L1(l, q);
    }
    flux(q) = un + s * (pv - ph);
  }
  return flux;
}

Eigen::VectorXd darcy_local_conservation(const DarcyProblem& prob, const DarcySolution& sol) {
  const QuadMesh& mesh = *prob.mesh;
  const ElementTables& t = *prob.tables;
  const int ne = mesh.num_elements(), m = t.m, nf = t.nf;
  Eigen::VectorXd resid(ne);
  for (int e = 0; e < ne; ++e) {
    double bflux = 0.0;
    const auto& uses = mesh.element_faces[e];
    for (int f = 0; f < 4; ++f) {
      const double s = uses[f].sign;
      const int ucomp = (f < 2) ? 0 : 1;
      const auto& fnodes = t.face_nodes[f];
      const int g = uses[f].face * nf;
      for (int q = 0; q < t.nq; ++q) {
        double un = 0.0, pv = 0.0, ph = 0.0;
        for (int l = 0; l < nf; ++l) {
          un += sol.u(ucomp * m + fnodes[l], e) * t.L1(l, q);
          pv += sol.p_scaled(fnodes[l], e) * t.L1(l, q);
          ph += sol.phat_scaled(g + l) * t.L1(l, q);
        }
        bflux += t.wFace[f](q) * (s * un + pv - ph);
      }
    }
    double src = 0.0;
    if (prob.source_fn) {
      const double cx = mesh.cx(e), cy = mesh.cy(e);
      for (int q = 0; q < t.num_quad(); ++q)
        src += t.wVol(q) * prob.source_fn(t.qx_phys(cx, q), t.qy_phys(cy, q));
    } else if (prob.source_const.size() > 0) {
      src = prob.source_const(e) * mesh.element_area();
    }
    resid(e) = bflux - src;
  }
  return resid;
}

}  // namespace hdgflow
