#include "hdgflow/verification.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hdgflow/element_tables.hpp"

namespace hdgflow {

namespace {

struct MmsFields {
  double p, px, py;
  double c, cx, cy, cxx, cyy, cxy, ct;
  double ux, uy, uxx, uxy, uyx, uyy, divu;
};

MmsFields eval_fields(const MmsProblem& m, double x, double y, double t) {
  const double E = std::exp(-t);
  const auto sech2 = [](double v) {
    const double ch = std::cosh(v);
    return 1.0 / (ch * ch);
  };
  const double Tx = std::tanh(1.0 - x), Ty = std::tanh(1.0 - y);
  const double Sx = sech2(1.0 - x), Sy = sech2(1.0 - y);
  const double A = x * Tx, Ap = Tx - x * Sx, App = -2.0 * Sx - 2.0 * x * Sx * Tx;
  const double B = y * Ty, Bp = Ty - y * Sy, Bpp = -2.0 * Sy - 2.0 * y * Sy * Ty;

  MmsFields f{};
  f.p = 1.0 + A * B * E;
  f.px = Ap * B * E;
  f.py = A * Bp * E;
  const double pxx = App * B * E, pyy = A * Bpp * E, pxy = Ap * Bp * E;

  const double PI = M_PI;
  const double C0 = std::cos(t) / (4.0 * PI * PI);
  const double sx = std::sin(PI * x), sy = std::sin(PI * y);
  const double ox = std::cos(PI * x), oy = std::cos(PI * y);
  f.c = C0 * sx * sy;
  f.cx = C0 * PI * ox * sy;
  f.cy = C0 * PI * sx * oy;
  f.cxx = -PI * PI * f.c;
  f.cyy = -PI * PI * f.c;
  f.cxy = C0 * PI * PI * ox * oy;
  f.ct = -std::sin(t) * sx * sy / (4.0 * PI * PI);

  const double ms = std::pow(m.fluid.mu_s, -0.25), mo = std::pow(m.fluid.mu_o, -0.25);
  const double g = f.c * (ms - mo) + mo;
  const double nu = g * g * g * g;             // 1/mu(c)
  const double nup = 4.0 * g * g * g * (ms - mo);

  f.ux = -m.K * nu * f.px;
  f.uy = -m.K * nu * f.py;
  f.uxx = -m.K * (nup * f.cx * f.px + nu * pxx);
  f.uxy = -m.K * (nup * f.cy * f.px + nu * pxy);
  f.uyx = -m.K * (nup * f.cx * f.py + nu * pxy);
  f.uyy = -m.K * (nup * f.cy * f.py + nu * pyy);
  f.divu = f.uxx + f.uyy;
  return f;
}

}  // namespace

double MmsProblem::p(double x, double y, double t) const {
  return 1.0 + x * y * std::tanh(1.0 - x) * std::tanh(1.0 - y) * std::exp(-t);
}

double MmsProblem::c(double x, double y, double t) const {
  return std::cos(t) * std::sin(M_PI * x) * std::sin(M_PI * y) / (4.0 * M_PI * M_PI);
}

Eigen::Vector2d MmsProblem::velocity(double x, double y, double t) const {
  const MmsFields f = eval_fields(*this, x, y, t);
  return {f.ux, f.uy};
}

Eigen::Vector2d MmsProblem::flux(double x, double y, double t) const {
  const MmsFields f = eval_fields(*this, x, y, t);
  const Eigen::Matrix2d D = dispersion_tensor(fluid, Eigen::Vector2d(f.ux, f.uy));
  return -D * Eigen::Vector2d(f.cx, f.cy);
}

double MmsProblem::flow_forcing(double x, double y, double t) const {
  return eval_fields(*this, x, y, t).divu;
}

double MmsProblem::transport_forcing(double x, double y, double t) const {
  const MmsFields f = eval_fields(*this, x, y, t);
  const double w = std::hypot(f.ux, f.uy);
  const double lap = f.cxx + f.cyy;
  double divDgc;
  if (w < kVelocityEps) {
    divDgc = fluid.d_m * lap;
  } else {
    const double beta = fluid.alpha_l - fluid.alpha_t;
    const double wx = (f.ux * f.uxx + f.uy * f.uyx) / w;
    const double wy = (f.ux * f.uxy + f.uy * f.uyy) / w;
    const double h = f.ux * f.cx + f.uy * f.cy;
    const double hx = f.uxx * f.cx + f.ux * f.cxx + f.uyx * f.cy + f.uy * f.cxy;
    const double hy = f.uxy * f.cx + f.ux * f.cxy + f.uyy * f.cy + f.uy * f.cyy;
    divDgc = (fluid.d_m + fluid.alpha_t * w) * lap + fluid.alpha_t * (wx * f.cx + wy * f.cy) +
             beta * ((hx * f.ux + hy * f.uy) + h * f.divu - h * (f.ux * wx + f.uy * wy) / w) / w;
  }
  const double conv = f.divu * f.c + f.ux * f.cx + f.uy * f.cy;
  return fluid.phi * f.ct + conv - divDgc;
}

MmsProblem build_mms_forcing() {
  MmsProblem m;
  m.fluid.mu_s = 1.0;
  m.fluid.mu_o = 2.0;  // mobility ratio 2
  m.fluid.phi = 0.2;
  m.fluid.d_m = 1.0;
  m.fluid.alpha_t = 1.8e-6;
  m.fluid.alpha_l = 1.8e-5;
  m.K = 9.44e-3;
  return m;
}

MmsErrors run_mms_single(int k, int N, double T) {
  const MmsProblem mms = build_mms_forcing();
  const QuadMesh mesh = build_uniform_quad_mesh(N, N, Rect{0.0, 1.0, 0.0, 1.0});
  const ElementTables tables = build_element_tables(k, mesh.hx, mesh.hy);
  const Eigen::VectorXd K = Eigen::VectorXd::Constant(mesh.num_elements(), mms.K);

  const double dt0 = 0.1 / ((k + 1) * std::pow(static_cast<double>(N), k));
  // Last step shortened so the run lands exactly on T.
  const int nsteps = std::max(1, static_cast<int>(std::ceil(T / dt0 - 1e-9)));

  Eigen::MatrixXd c, u, p, q;
  Eigen::VectorXd chat;
  project_initial_condition(mesh, tables, [&](double x, double y) { return mms.c(x, y, 0.0); },
                            c, chat);

  CondensedSolver flow_cache, transport_cache;
  DarcySolution flow;
  double t = 0.0;
  for (int n = 0; n < nsteps; ++n) {
    const double dt = (n == nsteps - 1) ? (T - t) : dt0;
    DarcyProblem fp;
    fp.mesh = &mesh;
    fp.tables = &tables;
    fp.K = &K;
    fp.fluid = &mms.fluid;
    fp.conc = &c;
    fp.source_fn = [&, t](double x, double y) { return mms.flow_forcing(x, y, t); };
    fp.bc.kind = DarcyBC::Kind::Dirichlet;
    fp.bc.dirichlet = [&, t](double x, double y) { return mms.p(x, y, t); };
    flow = darcy_solve(fp, &flow_cache);

    const double tn1 = t + dt;
    TransportProblem tp;
    tp.mesh = &mesh;
    tp.tables = &tables;
    tp.fluid = &mms.fluid;
    tp.velocity = &flow.u;
    tp.c_prev = &c;
    tp.dt = dt;
    tp.source_fn = [&, tn1](double x, double y) { return mms.transport_forcing(x, y, tn1); };
    tp.bc.kind = TransportBC::Kind::Dirichlet;
    tp.bc.dirichlet = [&, tn1](double x, double y) { return mms.c(x, y, tn1); };
    const TransportSolution ts = transport_step(tp, &transport_cache);
    c = ts.c;
    q = ts.q;
    chat = ts.chat;
    t = tn1;
  }

  // flow fields at the final time, consistent with c(T)
  DarcyProblem fp;
  fp.mesh = &mesh;
  fp.tables = &tables;
  fp.K = &K;
  fp.fluid = &mms.fluid;
  fp.conc = &c;
  fp.source_fn = [&](double x, double y) { return mms.flow_forcing(x, y, T); };
  fp.bc.kind = DarcyBC::Kind::Dirichlet;
  fp.bc.dirichlet = [&](double x, double y) { return mms.p(x, y, T); };
  flow = darcy_solve(fp, &flow_cache);
  u = flow.u;
  p = flow.physical_p();

  // L2 errors at T with the assembly quadrature
  MmsErrors err;
  const int m = tables.m, Q = tables.num_quad();
  double ep = 0, eu = 0, ec = 0, eq = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    const Eigen::VectorXd ph = tables.Phi.transpose() * p.col(e);
    const Eigen::VectorXd ch = tables.Phi.transpose() * c.col(e);
    const Eigen::VectorXd uxh = tables.Phi.transpose() * u.col(e).head(m);
    const Eigen::VectorXd uyh = tables.Phi.transpose() * u.col(e).tail(m);
    const Eigen::VectorXd qxh = tables.Phi.transpose() * q.col(e).head(m);
    const Eigen::VectorXd qyh = tables.Phi.transpose() * q.col(e).tail(m);
    for (int qi = 0; qi < Q; ++qi) {
      const double x = tables.qx_phys(cx, qi), y = tables.qy_phys(cy, qi);
      const double w = tables.wVol(qi);
      const Eigen::Vector2d ue = mms.velocity(x, y, T);
      const Eigen::Vector2d qe = mms.flux(x, y, T);
      ep += w * std::pow(ph(qi) - mms.p(x, y, T), 2);
      ec += w * std::pow(ch(qi) - mms.c(x, y, T), 2);
      eu += w * (std::pow(uxh(qi) - ue(0), 2) + std::pow(uyh(qi) - ue(1), 2));
      eq += w * (std::pow(qxh(qi) - qe(0), 2) + std::pow(qyh(qi) - qe(1), 2));
    }
  }
  err.p = std::sqrt(ep);
  err.u = std::sqrt(eu);
  err.c = std::sqrt(ec);
  err.q = std::sqrt(eq);
  return err;
}

ConvergenceReport run_convergence(const std::vector<int>& k_list, const std::vector<int>& N_list,
                                  double T) {
  ConvergenceReport rep;
  for (int k : k_list) {
    bool first = true;
    MmsErrors prev;
    for (int N : N_list) {
      ConvergenceRow row;
      row.k = k;
      row.N = N;
      row.err = run_mms_single(k, N, T);
      if (!first) {
        row.rate.p = std::log2(prev.p / row.err.p);
        row.rate.u = std::log2(prev.u / row.err.u);
        row.rate.c = std::log2(prev.c / row.err.c);
        row.rate.q = std::log2(prev.q / row.err.q);
        row.has_rate = true;
      }
      prev = row.err;
      first = false;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}
std::string fmt_rate(double v, bool has) {
  if (!has) return "   -  ";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}
}  // namespace

std::string ConvergenceReport::text_table() const {
  std::ostringstream os;
  os << " k   N    p error     rate     u error     rate     c error     rate     q error     rate\n";
  int last_k = -1;
  for (const auto& r : rows) {
    if (last_k != -1 && r.k != last_k) os << "\n";
    last_k = r.k;
    char head[32];
    std::snprintf(head, sizeof(head), "%2d %3d  ", r.k, r.N);
    os << head << fmt(r.err.p) << "  " << fmt_rate(r.rate.p, r.has_rate) << "  " << fmt(r.err.u)
       << "  " << fmt_rate(r.rate.u, r.has_rate) << "  " << fmt(r.err.c) << "  "
       << fmt_rate(r.rate.c, r.has_rate) << "  " << fmt(r.err.q) << "  "
       << fmt_rate(r.rate.q, r.has_rate) << "\n";
  }
  return os.str();
}

std::string ConvergenceReport::csv() const {
  std::ostringstream os;
  os << "k,N,err_p,rate_p,err_u,rate_u,err_c,rate_c,err_q,rate_q\n";
  for (const auto& r : rows) {
    os << r.k << "," << r.N << ",";
    char buf[256];
    if (r.has_rate)
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                    r.err.p, r.rate.p, r.err.u, r.rate.u, r.err.c, r.rate.c, r.err.q, r.rate.q);
    else
      std::snprintf(buf, sizeof(buf), "%.17g,,%.17g,,%.17g,,%.17g,", r.err.p, r.err.u, r.err.c,
                    r.err.q);
    os << buf << "\n";
  }
  return os.str();
}

std::int64_t hdg_trace_dofs_2d(int k, int N) {
  return static_cast<std::int64_t>(k + 1) * (2LL * N * N + 2LL * N);
}
std::int64_t dg_dofs_2d(int k, int N) {
  return static_cast<std::int64_t>(k + 1) * (k + 1) * N * static_cast<std::int64_t>(N);
}
std::int64_t hdg_trace_dofs_3d(int k, int N) {
  return static_cast<std::int64_t>(k + 2) * (k + 1) * (6LL * N * N * N + 2LL * N * N) / 2;
}
std::int64_t dg_dofs_3d(int k, int N) {
  return 5LL * (k + 3) * (k + 2) * (k + 1) * static_cast<std::int64_t>(N) * N * N / 6;
}
double dof_ratio_2d(int k, int N) {
  return static_cast<double>(hdg_trace_dofs_2d(k, N)) / static_cast<double>(dg_dofs_2d(k, N));
}
double dof_ratio_3d(int k, int N) {
  return static_cast<double>(hdg_trace_dofs_3d(k, N)) / static_cast<double>(dg_dofs_3d(k, N));
}

std::int64_t enumerate_trace_dofs(const QuadMesh& mesh, int k) {
  std::int64_t n = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) n += k + 1;
  return n;
}

MassBalanceReport mass_balance_report(const DarcyProblem& flow, const DarcySolution& flow_sol,
                                      const TransportProblem& transport,
                                      const TransportSolution& transport_sol) {
  MassBalanceReport rep;
  rep.darcy_element_residual = darcy_local_conservation(flow, flow_sol);
  rep.darcy_global_residual = rep.darcy_element_residual.sum();
  const QuadMesh& mesh = *flow.mesh;
  const ElementTables& t = *flow.tables;
  double scale = 0.0, total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double src = 0.0;
    if (flow.source_fn) {
      const double cx = mesh.cx(e), cy = mesh.cy(e);
      for (int q = 0; q < t.num_quad(); ++q)
        src += t.wVol(q) * flow.source_fn(t.qx_phys(cx, q), t.qy_phys(cy, q));
    } else if (flow.source_const.size() > 0) {
      src = flow.source_const(e) * mesh.element_area();
    }
    scale = std::max(scale, std::abs(src));
    total += src;
  }
  rep.darcy_source_scale = scale;
  rep.darcy_source_imbalance = total;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (const FaceUse& fu : mesh.element_faces[e]) {
      if (!mesh.faces[fu.face].boundary) continue;
      const Eigen::VectorXd flux = darcy_trace_flux(t, mesh, flow_sol, e, fu.face);
      rep.darcy_boundary_outflow += fu.sign * t.wFace[fu.local_index].dot(flux);
    }
  }
  const BalanceResult tb = transport_global_balance(transport, transport_sol);
  rep.transport_residual = tb.residual;
  rep.transport_scale = tb.scale;
  return rep;
}

}  // namespace hdgflow
