// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdgflow/hdg_darcy.hpp"
#include "hdgflow/hdg_transport.hpp"
#include "hdgflow/simulation.hpp"
#include "hdgflow/verification.hpp"
#include "monolithic.hpp"

using namespace hdgflow;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

SimulationConfig quarter_five_spot_config(int n, int degree) {
  SimulationConfig cfg;
  cfg.nx = cfg.ny = n;
  cfg.domain = Rect{0, 1000, 0, 1000};
  cfg.degree = degree;
  cfg.fluid.mu_s = 1.0;
  cfg.fluid.mu_o = 2.0;  // mobility ratio 2
  cfg.fluid.phi = 0.2;
  cfg.fluid.d_m = 1e-9;
  cfg.fluid.alpha_t = 1.8e-6;
  cfg.fluid.alpha_l = 1.8e-5;
  cfg.permeability.type = PermeabilitySpec::Type::Constant;
  cfg.permeability.value = 1e-10;
  // element-aligned corner well blocks
  cfg.wells.injection = Rect{0, 125, 0, 125};
  cfg.wells.production = Rect{875, 1000, 875, 1000};
  cfg.wells.rate = 0.28;
  cfg.wells.injected_conc = 1.0;
  cfg.dt = 0.1;
  cfg.t_end = 10.0;
  cfg.mode = SimulationConfig::Mode::Wells;
  return cfg;
}

SimulationConfig lens_config(int n, int degree) {
  SimulationConfig cfg = quarter_five_spot_config(n, degree);
  cfg.permeability.type = PermeabilitySpec::Type::Lens;
  cfg.permeability.value = 1e-10;
  cfg.permeability.lens_value = 1e-13;  // 1000 times smaller
  cfg.permeability.lens_region = Rect{250, 500, 250, 500};
  return cfg;
}

// ---------------------------------------------------------------------------
// criterion 1: manufactured-solution convergence
// ---------------------------------------------------------------------------

struct TableRow {
  double p, u, c, q;
};
// Reference errors for k in {1,2,3}, N in {4,8,16}.
const TableRow kReference[3][3] = {
    {{4.5289e-03, 9.9657e-05, 9.9657e-04, 4.5389e-05},
     {1.3640e-03, 3.0906e-05, 3.0906e-04, 1.3671e-05},
     {3.7910e-04, 8.6748e-06, 8.6748e-05, 3.7997e-06}},
    {{4.5027e-05, 1.0323e-07, 1.0323e-05, 4.5027e-06},
     {6.4664e-06, 1.4819e-08, 1.4819e-06, 6.4664e-07},
     {8.6804e-07, 1.9975e-09, 1.9975e-07, 8.6804e-08}},
    {{3.5178e-06, 8.0583e-09, 8.0583e-07, 3.5178e-07},
     {2.4617e-07, 5.6509e-10, 5.6509e-08, 2.4617e-08},
     {1.6248e-08, 3.7459e-11, 3.7459e-09, 1.6248e-09}}};

Criterion criterion_mms() {
  Criterion cr{1, "manufactured-solution convergence rates and error regime"};
  const ConvergenceReport rep = run_convergence({1, 2, 3}, {4, 8, 16}, 0.1);
  std::ostringstream detail;
  bool rates_ok = true, magnitudes_ok = true;

  for (int ki = 0; ki < 3; ++ki) {
    const int k = ki + 1;
    const ConvergenceRow& fine = rep.rows[ki * 3 + 2];  // N = 16 row (rate vs N = 8)
    const double target = k + 1;
    const double rates[4] = {fine.rate.p, fine.rate.u, fine.rate.c, fine.rate.q};
    const char* names[4] = {"p", "u", "c", "q"};
    for (int v = 0; v < 4; ++v) {
      if (std::abs(rates[v] - target) > 0.2) {
        rates_ok = false;
        detail << " [rate " << names[v] << " k=" << k << ": " << rates[v] << "]";
      }
    }
    for (int ni = 0; ni < 3; ++ni) {
      const ConvergenceRow& row = rep.rows[ki * 3 + ni];
      const double errs[4] = {row.err.p, row.err.u, row.err.c, row.err.q};
      const double refs[4] = {kReference[ki][ni].p, kReference[ki][ni].u, kReference[ki][ni].c,
                              kReference[ki][ni].q};
      for (int v = 0; v < 4; ++v) {
        const double ratio = errs[v] / refs[v];
        if (ratio > 10.0 || ratio < 0.1) {
          magnitudes_ok = false;
          detail << " [magnitude " << names[v] << " k=" << k << " N=" << row.N << ": "
                 << fmt(errs[v]) << " vs " << fmt(refs[v]) << " (" << fmt(ratio) << "x)]";
        }
      }
    }
  }
  std::printf("%s", rep.text_table().c_str());
  cr.pass = rates_ok && magnitudes_ok;
  cr.detail = (rates_ok ? std::string("rates within +-0.2 of k+1;")
                        : std::string("rate failures;")) +
              (magnitudes_ok ? " magnitudes within 10x" : " magnitude failures") + detail.str();
  return cr;
}

// ---------------------------------------------------------------------------
// criterion 2: DOF economics
// ---------------------------------------------------------------------------

Criterion criterion_dofs() {
  Criterion cr{2, "degree-of-freedom thresholds and brute-force counts"};
  bool ok = true;
  std::ostringstream detail;
  for (int k = 1; k <= 64 && ok; ++k) {
    for (int N = 1; N <= 64 && ok; ++N) {
      const bool fewer2 = dof_ratio_2d(k, N) < 1.0;
      const bool thr2 = static_cast<long long>(k) * N > N + 2;  // k > 1 + 2/N
      const bool fewer3 = dof_ratio_3d(k, N) < 1.0;
      const bool thr3 = 5LL * k * N > 3LL * N + 6;  // k > (3 + 6/N)/5
      if (fewer2 != thr2 || fewer3 != thr3) {
        ok = false;
        detail << " [threshold mismatch at k=" << k << " N=" << N << "]";
      }
    }
  }
  for (int N = 1; N <= 64 && ok; ++N) {
    const QuadMesh mesh = build_uniform_quad_mesh(N, N, Rect{0, 1, 0, 1});
    for (int k : {1, 2, 3, 4, 8, 16}) {
      if (enumerate_trace_dofs(mesh, k) != hdg_trace_dofs_2d(k, N)) {
        ok = false;
        detail << " [enumeration mismatch at k=" << k << " N=" << N << "]";
      }
      long long dg = 0;
      for (int e = 0; e < mesh.num_elements(); ++e) dg += (k + 1) * (k + 1);
      if (dg != dg_dofs_2d(k, N)) {
        ok = false;
        detail << " [DG count mismatch at k=" << k << " N=" << N << "]";
      }
    }
  }
  if (dof_ratio_2d(3, 32) != 0.515625) {
    ok = false;
    detail << " [ratio(3,32) != 0.515625]";
  }
  cr.pass = ok;
  cr.detail =
      ok ? "thresholds exact over k,N in [1,64]; enumeration matches formulas" : detail.str();
  return cr;
}

// ---------------------------------------------------------------------------
// criteria 3, 5, 6: the homogeneous quarter-five-spot run
// ---------------------------------------------------------------------------

void criterion_quarter_five_spot(std::vector<Criterion>& out) {
  Criterion c3{3, "per-step conservation on the homogeneous scenario"};
  Criterion c5{5, "trace single-valuedness on the homogeneous scenario"};
  Criterion c6{6, "concentration bounds [-0.1, 1.1] at snapshot times"};
  try {
    SimulationConfig cfg = quarter_five_spot_config(16, 4);
    Simulator sim(cfg);
    double max_local = 0.0, max_balance = 0.0;
    double max_flow_jump = 0.0, max_transport_jump = 0.0;
    bool bounds_ok = true;
    std::ostringstream bounds_detail;
    const std::set<int> snapshot_steps = {25, 50, 75, 100};
    std::mt19937 rng(7321);

    while (!sim.finished()) {
      sim.step();
      const MassBalanceReport rep =
          mass_balance_report(sim.last_flow_problem(), sim.last_flow_solution(),
                              sim.last_transport_problem(), sim.last_transport_solution());
      max_local = std::max(max_local, rep.darcy_element_residual.cwiseAbs().maxCoeff() /
                                          rep.darcy_source_scale);
      max_balance =
          std::max(max_balance, std::abs(rep.transport_residual) / rep.transport_scale);

      if (sim.steps_taken() == 25) {
        // trace single-valuedness at t = 2.5 on 50 random interior faces
        const QuadMesh& mesh = sim.mesh();
        std::vector<int> interior;
        for (int f = 0; f < mesh.num_faces(); ++f)
          if (!mesh.faces[f].boundary) interior.push_back(f);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(interior.size()) - 1);
        double flow_scale = 0.0, transport_scale = 0.0;
        std::vector<double> fjump, tjump;
        for (int trial = 0; trial < 50; ++trial) {
          const int f = interior[pick(rng)];
          int eplus = -1, eminus = -1;
          for (int e = 0; e < mesh.num_elements(); ++e)
            for (const FaceUse& fu : mesh.element_faces[e])
              if (fu.face == f) (fu.sign > 0 ? eplus : eminus) = e;
          const Eigen::VectorXd fa =
              darcy_trace_flux(sim.tables(), mesh, sim.last_flow_solution(), eplus, f);
          const Eigen::VectorXd fb =
              darcy_trace_flux(sim.tables(), mesh, sim.last_flow_solution(), eminus, f);
          fjump.push_back((fa - fb).lpNorm<Eigen::Infinity>());
          flow_scale = std::max(flow_scale, fa.cwiseAbs().maxCoeff());
          const Eigen::VectorXd ma = transport_flux_moments(
              sim.last_transport_problem(), sim.last_transport_solution(), eplus, f);
          const Eigen::VectorXd mb = transport_flux_moments(
              sim.last_transport_problem(), sim.last_transport_solution(), eminus, f);
          tjump.push_back((ma - mb).lpNorm<Eigen::Infinity>());
          transport_scale = std::max(transport_scale, ma.cwiseAbs().maxCoeff());
        }
        for (double j : fjump) max_flow_jump = std::max(max_flow_jump, j / (1.0 + flow_scale));
        for (double j : tjump)
          max_transport_jump = std::max(max_transport_jump, j / (1.0 + transport_scale));
      }

      if (snapshot_steps.count(sim.steps_taken())) {
        const double cmin = sim.state().c.minCoeff();
        const double cmax = sim.state().c.maxCoeff();
        if (cmin < -0.1 || cmax > 1.1) {
          bounds_ok = false;
          bounds_detail << " [t=" << sim.time() << ": c in [" << fmt(cmin) << ", " << fmt(cmax)
                        << "]]";
        }
      }
    }
    c3.pass = max_local <= 1e-10 && max_balance <= 1e-9;
    c3.detail = "max local residual " + fmt(max_local) + " (tol 1e-10), max balance " +
                fmt(max_balance) + " (tol 1e-9) over 100 steps";
    c5.pass = max_flow_jump <= 1e-9 && max_transport_jump <= 1e-9;
    c5.detail = "flow jump " + fmt(max_flow_jump) + ", transport flux moment jump " +
                fmt(max_transport_jump) + " (tol 1e-9, 50 faces)";
    c6.pass = bounds_ok;
    c6.detail = bounds_ok ? "nodal values within [-0.1, 1.1] at t in {2.5, 5, 7.5, 10}"
                          : bounds_detail.str();
  } catch (const std::exception& e) {
    c3.detail = c5.detail = c6.detail = std::string("run failed: ") + e.what();
  }
  out.push_back(c3);
  out.push_back(c5);
  out.push_back(c6);
}

// ---------------------------------------------------------------------------
// criterion 4: condensed vs monolithic
// ---------------------------------------------------------------------------

Criterion criterion_monolithic() {
  Criterion cr{4, "condensed solutions match the monolithic block systems"};
  double worst = 0.0;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int k : {1, 2}) {
    for (auto [nx, ny] : {std::pair{2, 2}, {3, 3}, {2, 3}}) {
      const QuadMesh mesh = build_uniform_quad_mesh(nx, ny, Rect{0, 1, 0, 1});
      const ElementTables tables = build_element_tables(k, mesh.hx, mesh.hy);
      const int ne = mesh.num_elements(), m = tables.m;
      const Eigen::VectorXd K = Eigen::VectorXd::Constant(ne, 0.5);
      FluidModel fluid;
      fluid.mu_s = 1.0;
      fluid.mu_o = 2.0;
      fluid.phi = 0.2;
      fluid.d_m = 0.8;
      fluid.alpha_t = 0.05;
      fluid.alpha_l = 0.3;
      Eigen::MatrixXd conc(m, ne);
      for (int e = 0; e < ne; ++e)
        for (int i = 0; i < m; ++i) conc(i, e) = dist(rng);

      for (int mode = 0; mode < 2; ++mode) {
        DarcyProblem fp;
        fp.mesh = &mesh;
        fp.tables = &tables;
        fp.K = &K;
        fp.fluid = &fluid;
        fp.conc = &conc;
        if (mode == 0) {
          fp.bc.kind = DarcyBC::Kind::Dirichlet;
          fp.bc.dirichlet = [](double x, double y) { return 1 + x * y + 0.2 * x; };
          fp.source_fn = [](double x, double y) { return std::sin(2 * x) - y; };
        } else {
          fp.bc.kind = DarcyBC::Kind::NoFlowPin;
          fp.source_const = Eigen::VectorXd::Zero(ne);
          fp.source_const(0) = 1.0;
          fp.source_const(ne - 1) = -1.0;
        }
        const DarcyCondensed cond = condense_darcy(fp);
        const DarcySolution sol = darcy_solve(fp);
        std::vector<testing::RawElement> ems;
        for (int e = 0; e < ne; ++e) {
          const DarcyElementMatrices em = assemble_darcy_local(fp, e);
          ems.push_back({em.Kee, em.Kef, em.Kfe, em.Kff, em.Re, em.Rf});
        }
        const auto mono =
            testing::solve_monolithic(mesh, tables.nf, ems, cond.system.constraints);
        worst = std::max(worst, (mono.trace - sol.phat_scaled).lpNorm<Eigen::Infinity>());
        for (int e = 0; e < ne; ++e) {
          worst = std::max(worst, (mono.interior.col(e).head(2 * m) - sol.u.col(e))
                                      .lpNorm<Eigen::Infinity>());
          worst = std::max(worst, (mono.interior.col(e).tail(m) - sol.p_scaled.col(e))
                                      .lpNorm<Eigen::Infinity>());
        }

        // transport with a velocity from the flow solve
        TransportProblem tp;
        tp.mesh = &mesh;
        tp.tables = &tables;
        tp.fluid = &fluid;
        tp.velocity = &sol.u;
        tp.c_prev = &conc;
        tp.dt = 0.05;
        if (mode == 0) {
          tp.bc.kind = TransportBC::Kind::Dirichlet;
          tp.bc.dirichlet = [](double x, double y) { return 0.1 + 0.3 * x + y * y; };
          tp.source_fn = [](double x, double y) { return std::cos(3 * y) + x; };
        } else {
          tp.bc.kind = TransportBC::Kind::NoFlow;
          tp.q_injection = Eigen::VectorXd::Zero(ne);
          tp.q_production = Eigen::VectorXd::Zero(ne);
          tp.q_injection(0) = 0.5;
          tp.q_production(ne - 1) = 0.5;
        }
        const TransportCondensed tcond = condense_transport(tp);
        const TransportSolution tsol = transport_step(tp);
        std::vector<testing::RawElement> tems;
        for (int e = 0; e < ne; ++e) {
          const TransportElementMatrices em = assemble_transport_local(tp, e);
          tems.push_back({em.Kee, em.Kef, em.Kfe, em.Kff, em.Re, em.Rf});
        }
        const auto tmono =
            testing::solve_monolithic(mesh, tables.nf, tems, tcond.system.constraints);
        worst = std::max(worst, (tmono.trace - tsol.chat).lpNorm<Eigen::Infinity>());
        for (int e = 0; e < ne; ++e) {
          worst = std::max(worst, (tmono.interior.col(e).head(2 * m) - tsol.q.col(e))
                                      .lpNorm<Eigen::Infinity>());
          worst = std::max(worst, (tmono.interior.col(e).tail(m) - tsol.c.col(e))
                                      .lpNorm<Eigen::Infinity>());
        }
      }
    }
  }
  cr.pass = worst <= 1e-9;
  cr.detail = "max coefficient difference " + fmt(worst) + " (tol 1e-9)";
  return cr;
}

// ---------------------------------------------------------------------------
// criterion 7: permeability lens
// ---------------------------------------------------------------------------

Criterion criterion_lens() {
  Criterion cr{7, "concentration avoids the low-permeability lens"};
  try {
    SimulationConfig cfg = lens_config(16, 4);
    cfg.t_end = 7.5;
    Simulator sim(cfg);
    while (!sim.finished()) sim.step();

    const QuadMesh& mesh = sim.mesh();
    const ElementTables& t = sim.tables();
    const Eigen::VectorXd intPhi = t.Phi * t.wVol;
    const Rect lens{250, 500, 250, 500};
    const Rect band{0, 750, 0, 750};
    double lens_mass = 0.0, lens_area = 0.0, band_mass = 0.0, band_area = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const double mass = intPhi.dot(sim.state().c.col(e));
      if (element_in_region(mesh, e, lens)) {
        lens_mass += mass;
        lens_area += mesh.element_area();
      } else if (element_in_region(mesh, e, band)) {
        band_mass += mass;
        band_area += mesh.element_area();
      }
    }
    const double mean_lens = lens_mass / lens_area;
    const double mean_band = band_mass / band_area;
    cr.pass = mean_lens < mean_band;
    cr.detail = "mean c at t=7.5: lens " + fmt(mean_lens) + " vs band " + fmt(mean_band);
  } catch (const std::exception& e) {
    cr.detail = std::string("run failed: ") + e.what();
  }
  return cr;
}

// ---------------------------------------------------------------------------
// criterion 8: high-order robustness on the lens
// ---------------------------------------------------------------------------

Criterion criterion_high_order() {
  Criterion cr{8, "lens scenario runs to completion for k in {1,2,4,8,16}"};
  std::ostringstream detail;
  bool ok = true;
  for (int k : {1, 2, 4, 8, 16}) {
    const auto t0 = Clock::now();
    try {
      SimulationConfig cfg = lens_config(16, k);
      Simulator sim(cfg);
      while (!sim.finished()) sim.step();
      detail << " [k=" << k << ": " << static_cast<int>(seconds_since(t0)) << " s]";
    } catch (const std::exception& e) {
      ok = false;
      detail << " [k=" << k << " FAILED: " << e.what() << "]";
    }
  }
  cr.pass = ok;
  cr.detail = "T=10, dt=0.1, 16x16 mesh;" + detail.str();
  return cr;
}

// ---------------------------------------------------------------------------
// criterion 9: patch tests
// ---------------------------------------------------------------------------

Criterion criterion_patch() {
  Criterion cr{9, "constant and linear patch solutions reproduced"};
  double worst = 0.0;
  for (int n : {2, 4}) {
    const QuadMesh mesh = build_uniform_quad_mesh(n, n, Rect{0, 1, 0, 1});
    const ElementTables tables = build_element_tables(1, mesh.hx, mesh.hy);
    const int ne = mesh.num_elements(), m = tables.m, n1 = tables.k + 1;
    const Eigen::VectorXd K = Eigen::VectorXd::Constant(ne, 1.0);
    FluidModel fluid;
    fluid.mu_s = fluid.mu_o = 1.0;
    fluid.phi = 0.2;
    fluid.d_m = 0.7;
    fluid.alpha_t = fluid.alpha_l = 0.0;
    const Eigen::MatrixXd conc = Eigen::MatrixXd::Zero(m, ne);

    for (int mode = 0; mode < 2; ++mode) {  // 0: constant, 1: linear
      DarcyProblem fp;
      fp.mesh = &mesh;
      fp.tables = &tables;
      fp.K = &K;
      fp.fluid = &fluid;
      fp.conc = &conc;
      fp.bc.kind = DarcyBC::Kind::Dirichlet;
      if (mode == 0)
        fp.bc.dirichlet = [](double, double) { return 1.0; };
      else
        fp.bc.dirichlet = [](double x, double) { return x; };
      const DarcySolution sol = darcy_solve(fp);
      const Eigen::MatrixXd pp = sol.physical_p();
      for (int e = 0; e < ne; ++e)
        for (int b = 0; b < n1; ++b)
          for (int a = 0; a < n1; ++a) {
            const double x = mesh.cx(e) + 0.5 * mesh.hx * tables.basis.nodes(a);
            const double exact_p = mode == 0 ? 1.0 : x;
            const double exact_ux = mode == 0 ? 0.0 : -1.0;
            const int i = a + n1 * b;
            worst = std::max(worst, std::abs(pp(i, e) - exact_p));
            worst = std::max(worst, std::abs(sol.u(i, e) - exact_ux));
            worst = std::max(worst, std::abs(sol.u(m + i, e)));
          }

      // transport: c = const or c = x with u = (-1, 0), one implicit step
      Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(2 * m, ne);
      Eigen::MatrixXd c_prev(m, ne);
      for (int e = 0; e < ne; ++e)
        for (int b = 0; b < n1; ++b)
          for (int a = 0; a < n1; ++a) {
            const double x = mesh.cx(e) + 0.5 * mesh.hx * tables.basis.nodes(a);
            c_prev(a + n1 * b, e) = mode == 0 ? 1.0 : x;
            if (mode == 1) velocity(a + n1 * b, e) = -1.0;
          }
      TransportProblem tp;
      tp.mesh = &mesh;
      tp.tables = &tables;
      tp.fluid = &fluid;
      tp.velocity = &velocity;
      tp.c_prev = &c_prev;
      tp.dt = 0.25;
      tp.bc.kind = TransportBC::Kind::Dirichlet;
      if (mode == 0)
        tp.bc.dirichlet = [](double, double) { return 1.0; };
      else {
        tp.bc.dirichlet = [](double x, double) { return x; };
        tp.source_fn = [](double, double) { return -1.0; };
      }
      const TransportSolution ts = transport_step(tp);
      worst = std::max(worst, (ts.c - c_prev).cwiseAbs().maxCoeff());
    }
  }
  cr.pass = worst <= 1e-9;
  cr.detail = "max deviation " + fmt(worst) + " (tol 1e-9) on 2x2 and 4x4 meshes";
  return cr;
}

// ---------------------------------------------------------------------------
// SPE10-style smoke run on a synthetic channelized raster
// ---------------------------------------------------------------------------

Criterion criterion_spe10_smoke() {
  Criterion cr{10, "synthetic channelized raster: ingestion and 10-step run"};
  try {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hdgflow_acceptance";
    fs::create_directories(dir);
    // channelized field with contrast 1e4: sinuous high-permeability bands
    {
      std::ofstream out(dir / "channels.txt");
      out << "64 64\n";
      for (int r = 0; r < 64; ++r) {
        for (int c = 0; c < 64; ++c) {
          const double wave = 6.0 * std::sin(2.0 * M_PI * c / 32.0);
          int band = (r + static_cast<int>(std::floor(wave))) % 16;
          if (band < 0) band += 16;
          const bool channel = band < 5;
          out << (channel ? 1e-10 : 1e-14) << (c == 63 ? "" : " ");
        }
        out << "\n";
      }
    }
    const Raster raster = load_spe10_slice((dir / "channels.txt").string());
    if (raster.rows != 64 || raster.cols != 64 || !(raster.min() > 0))
      throw std::runtime_error("raster ingestion failed");
    write_raster(raster, (dir / "channels64.txt").string());

    SimulationConfig cfg = quarter_five_spot_config(64, 4);
    cfg.permeability.type = PermeabilitySpec::Type::RasterFile;
    cfg.permeability.raster_path = (dir / "channels64.txt").string();
    cfg.wells.injection = Rect{0, 62.5, 0, 62.5};
    cfg.wells.production = Rect{937.5, 1000, 937.5, 1000};
    cfg.t_end = 1.0;  // 10 steps
    Simulator sim(cfg);
    double cmin = 0.0, cmax = 0.0;
    while (!sim.finished()) {
      sim.step();
      cmin = std::min(cmin, sim.state().c.minCoeff());
      cmax = std::max(cmax, sim.state().c.maxCoeff());
    }
    cr.pass = cmin >= -0.1 && cmax <= 1.1;
    cr.detail = "K contrast 1e4, 10 steps, c range [" + fmt(cmin) + ", " + fmt(cmax) + "]";
  } catch (const std::exception& e) {
    cr.detail = std::string("failed: ") + e.what();
  }
  return cr;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only.insert(std::atoi(argv[++i]));
  }
  const auto want = [&](int id) { return only.empty() || only.count(id) > 0; };

  std::vector<Criterion> results;
  const auto t0 = Clock::now();

  if (want(2)) results.push_back(criterion_dofs());
  if (want(9)) results.push_back(criterion_patch());
  if (want(4)) results.push_back(criterion_monolithic());
  if (want(3) || want(5) || want(6)) criterion_quarter_five_spot(results);
  if (want(7)) results.push_back(criterion_lens());
  if (want(1)) results.push_back(criterion_mms());
  if (want(10)) results.push_back(criterion_spe10_smoke());
  if (want(8)) results.push_back(criterion_high_order());

  std::sort(results.begin(), results.end(),
            [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  int failures = 0;
  std::printf("\n");
  for (const Criterion& c : results) {
    std::printf("%s %s %d: %s -- %s\n", c.pass ? "PASS" : "FAIL",
                c.id == 10 ? "smoke note" : "criterion", c.id, c.name.c_str(),
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("\n%d of %zu checks failed; total runtime %.0f s\n", failures, results.size(),
              seconds_since(t0));
  return failures;
}
