#include "hdgflow/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdgflow/errors.hpp"
#include "hdgflow/verification.hpp"

namespace hdgflow {

using nlohmann::json;

// ---------------------------------------------------------------------------
// rasters
// ---------------------------------------------------------------------------

Raster read_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open raster file: " + path);
  Raster r;
  if (!(in >> r.rows >> r.cols) || r.rows < 1 || r.cols < 1)
    throw FormatError("raster " + path + ": header must be 'rows cols' with positive counts");
  r.values.resize(r.rows, r.cols);
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j)
      if (!(in >> r.values(i, j)))
        throw FormatError("raster " + path + ": fewer values than rows*cols");
  double extra;
  if (in >> extra) throw FormatError("raster " + path + ": more values than rows*cols");
  return r;
}

void write_raster(const Raster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write raster file: " + path);
  out << raster.rows << " " << raster.cols << "\n";
  char buf[32];
  for (int i = 0; i < raster.rows; ++i) {
    for (int j = 0; j < raster.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", raster.values(i, j));
      out << buf << (j + 1 == raster.cols ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Raster resample_nearest(const Raster& in, int rows, int cols) {
  Raster out;
  out.rows = rows;
  out.cols = cols;
  out.values.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    int si = static_cast<int>((i + 0.5) * in.rows / rows);
    si = std::clamp(si, 0, in.rows - 1);
    for (int j = 0; j < cols; ++j) {
      int sj = static_cast<int>((j + 0.5) * in.cols / cols);
      sj = std::clamp(sj, 0, in.cols - 1);
      out.values(i, j) = in.values(si, sj);
    }
  }
  return out;
}

Raster load_spe10_slice(const std::string& path) {
  Raster r = read_raster(path);
  if (!(r.values.minCoeff() > 0.0) || !r.values.allFinite())
    throw DataError("raster " + path + ": permeabilities must be positive and finite");
  if (r.rows == 60 && r.cols == 220) r = resample_nearest(r, 64, 64);
  return r;
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> keys,
                 const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known) throw FormatError("config: unknown key '" + it.key() + "' in " + ctx);
  }
}

Rect parse_rect(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 4)
    throw FormatError("config: " + ctx + " must be [x0, x1, y0, y1]");
  return Rect{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

void SimulationConfig::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("config: mesh counts must be >= 1");
  if (!(domain.width() > 0) || !(domain.height() > 0))
    throw std::invalid_argument("config: degenerate domain");
  if (degree < 1 || degree > 16) throw std::invalid_argument("config: degree must be in [1,16]");
  if (!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("config: T must be >= dt");
  fluid.validate();
  const double tol = 1e-9 * std::max(1.0, t_end);
  for (double s : snapshot_times)
    if (s < -tol || s > t_end + tol)
      throw std::invalid_argument("config: snapshot time outside [0, T]");
  for (double s : profile_times)
    if (s < -tol || s > t_end + tol)
      throw std::invalid_argument("config: profile time outside [0, T]");
  if (profile_samples < 2) throw std::invalid_argument("config: profile_samples must be >= 2");
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError("config " + path + ": " + e.what());
  }

  SimulationConfig cfg;
  expect_keys(j, {"mesh", "degree", "physics", "permeability", "wells", "time", "output", "mode"},
              "top level");

  const json& mesh = j.at("mesh");
  expect_keys(mesh, {"nx", "ny", "n", "domain"}, "mesh");
  if (mesh.contains("n")) {
    cfg.nx = cfg.ny = mesh.at("n").get<int>();
  } else {
    cfg.nx = mesh.at("nx").get<int>();
    cfg.ny = mesh.at("ny").get<int>();
  }
  cfg.domain = parse_rect(mesh.at("domain"), "mesh.domain");

  cfg.degree = j.at("degree").get<int>();

  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "wells")
      cfg.mode = SimulationConfig::Mode::Wells;
    else if (mode == "manufactured")
      cfg.mode = SimulationConfig::Mode::Manufactured;
    else
      throw FormatError("config: mode must be 'wells' or 'manufactured'");
  }

  if (j.contains("physics")) {
    const json& ph = j.at("physics");
    expect_keys(ph, {"mu_s", "mu_o", "phi", "d_m", "alpha_t", "alpha_l"}, "physics");
    if (ph.contains("mu_s")) cfg.fluid.mu_s = ph.at("mu_s").get<double>();
    if (ph.contains("mu_o")) cfg.fluid.mu_o = ph.at("mu_o").get<double>();
    if (ph.contains("phi")) cfg.fluid.phi = ph.at("phi").get<double>();
    if (ph.contains("d_m")) cfg.fluid.d_m = ph.at("d_m").get<double>();
    if (ph.contains("alpha_t")) cfg.fluid.alpha_t = ph.at("alpha_t").get<double>();
    if (ph.contains("alpha_l")) cfg.fluid.alpha_l = ph.at("alpha_l").get<double>();
  }

  if (j.contains("permeability")) {
    const json& pm = j.at("permeability");
    expect_keys(pm, {"type", "value", "background", "lens_value", "region", "path"},
                "permeability");
    const std::string type = pm.at("type").get<std::string>();
    if (type == "constant") {
      cfg.permeability.type = PermeabilitySpec::Type::Constant;
      cfg.permeability.value = pm.at("value").get<double>();
    } else if (type == "lens") {
      cfg.permeability.type = PermeabilitySpec::Type::Lens;
      cfg.permeability.value = pm.at("background").get<double>();
      cfg.permeability.lens_value = pm.at("lens_value").get<double>();
      cfg.permeability.lens_region = parse_rect(pm.at("region"), "permeability.region");
    } else if (type == "raster") {
      cfg.permeability.type = PermeabilitySpec::Type::RasterFile;
      cfg.permeability.raster_path = pm.at("path").get<std::string>();
    } else {
      throw FormatError("config: permeability.type must be constant|lens|raster");
    }
  }

  if (j.contains("wells")) {
    const json& w = j.at("wells");
    expect_keys(w, {"injection", "production", "rate", "injected_concentration"}, "wells");
    cfg.wells.injection = parse_rect(w.at("injection"), "wells.injection");
    cfg.wells.production = parse_rect(w.at("production"), "wells.production");
    cfg.wells.rate = w.at("rate").get<double>();
    if (w.contains("injected_concentration"))
      cfg.wells.injected_conc = w.at("injected_concentration").get<double>();
  } else if (cfg.mode == SimulationConfig::Mode::Wells) {
    throw FormatError("config: wells section required in wells mode");
  }

  const json& tm = j.at("time");
  expect_keys(tm, {"dt", "T"}, "time");
  cfg.dt = tm.at("dt").get<double>();
  cfg.t_end = tm.at("T").get<double>();

  if (j.contains("output")) {
    const json& o = j.at("output");
    expect_keys(o, {"directory", "snapshot_times", "profile_times", "profile_samples"},
                "output");
    if (o.contains("directory")) cfg.output_dir = o.at("directory").get<std::string>();
    if (o.contains("snapshot_times"))
      cfg.snapshot_times = o.at("snapshot_times").get<std::vector<double>>();
    if (o.contains("profile_times"))
      cfg.profile_times = o.at("profile_times").get<std::vector<double>>();
    if (o.contains("profile_samples")) cfg.profile_samples = o.at("profile_samples").get<int>();
  }

  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// permeability
// ---------------------------------------------------------------------------

PermeabilityField build_permeability(const SimulationConfig& config, const QuadMesh& mesh) {
  PermeabilityField f;
  const int ne = mesh.num_elements();
  switch (config.permeability.type) {
    case PermeabilitySpec::Type::Constant: {
      if (!(config.permeability.value > 0)) throw DataError("permeability must be positive");
      f.K = Eigen::VectorXd::Constant(ne, config.permeability.value);
      break;
    }
    case PermeabilitySpec::Type::Lens: {
      if (!(config.permeability.value > 0) || !(config.permeability.lens_value > 0))
        throw DataError("permeability must be positive");
      if (!region_is_aligned(mesh, config.permeability.lens_region))
        throw MisalignedRegionError("lens region is not a union of elements");
      f.K = Eigen::VectorXd::Constant(ne, config.permeability.value);
      for (int e = 0; e < ne; ++e)
        if (element_in_region(mesh, e, config.permeability.lens_region))
          f.K(e) = config.permeability.lens_value;
      break;
    }
    case PermeabilitySpec::Type::RasterFile: {
      const Raster r = read_raster(config.permeability.raster_path);
      if (r.rows != mesh.ny || r.cols != mesh.nx)
        throw FormatError("raster size " + std::to_string(r.rows) + "x" +
                          std::to_string(r.cols) + " does not match mesh " +
                          std::to_string(mesh.ny) + "x" + std::to_string(mesh.nx));
      if (!(r.values.minCoeff() > 0.0) || !r.values.allFinite())
        throw DataError("raster permeabilities must be positive and finite");
      f.K.resize(ne);
      for (int e = 0; e < ne; ++e) f.K(e) = r.values(mesh.element_iy(e), mesh.element_ix(e));
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// state and simulator
// ---------------------------------------------------------------------------

void FieldState::check_sizes(const QuadMesh& mesh, int k) const {
  const int m = (k + 1) * (k + 1), ne = mesh.num_elements();
  const int ntr = mesh.num_faces() * (k + 1);
  if (c.rows() != m || c.cols() != ne || p.rows() != m || p.cols() != ne)
    throw std::logic_error("FieldState: scalar coefficient arrays have wrong shape");
  if (q.rows() != 2 * m || q.cols() != ne || u.rows() != 2 * m || u.cols() != ne)
    throw std::logic_error("FieldState: vector coefficient arrays have wrong shape");
  if (chat.size() != ntr || phat.size() != ntr)
    throw std::logic_error("FieldState: skeleton coefficient arrays have wrong shape");
}

Simulator::Simulator(const SimulationConfig& config)
    : config_(config),
      mesh_(build_uniform_quad_mesh(config.nx, config.ny, config.domain)),
      tables_(build_element_tables(config.degree, mesh_.hx, mesh_.hy)) {
  if (config.mode != SimulationConfig::Mode::Wells)
    throw std::invalid_argument("Simulator runs wells scenarios; manufactured runs go through "
                                "the verification harness");
  config_.validate();
  perm_ = build_permeability(config_, mesh_);
  sources_ = well_sources(mesh_, config_.wells);

  const int m = tables_.m, ne = mesh_.num_elements();
  state_.t = 0.0;
  state_.c = Eigen::MatrixXd::Zero(m, ne);
  state_.q = Eigen::MatrixXd::Zero(2 * m, ne);
  state_.p = Eigen::MatrixXd::Zero(m, ne);
  state_.u = Eigen::MatrixXd::Zero(2 * m, ne);
  state_.chat = Eigen::VectorXd::Zero(mesh_.num_faces() * tables_.nf);
  state_.phat = Eigen::VectorXd::Zero(mesh_.num_faces() * tables_.nf);

  flow_prob_.mesh = &mesh_;
  flow_prob_.tables = &tables_;
  flow_prob_.K = &perm_.K;
  flow_prob_.fluid = &config_.fluid;
  flow_prob_.conc = &state_.c;
  flow_prob_.source_const = sources_.q_injection - sources_.q_production;
  flow_prob_.bc.kind = DarcyBC::Kind::NoFlowPin;

  transport_prob_.mesh = &mesh_;
  transport_prob_.tables = &tables_;
  transport_prob_.fluid = &config_.fluid;
  transport_prob_.velocity = &flow_sol_.u;
  transport_prob_.c_prev = &c_prev_;
  transport_prob_.q_injection = sources_.q_injection;
  transport_prob_.q_production = sources_.q_production;
  transport_prob_.cbar = config_.wells.injected_conc;
  transport_prob_.bc.kind = TransportBC::Kind::NoFlow;
}

bool Simulator::finished() const {
  return config_.t_end - state_.t <= 1e-9 * std::max(1.0, config_.t_end);
}

void Simulator::ensure_flow() {
  if (flow_current_) return;
  try {
    flow_sol_ = darcy_solve(flow_prob_, &flow_cache_);
  } catch (const std::exception& e) {
    throw std::runtime_error("[flow] step " + std::to_string(steps_) + ": " + e.what());
  }
  state_.u = flow_sol_.u;
  state_.p = flow_sol_.physical_p();
  state_.phat = flow_sol_.physical_phat();
  flow_current_ = true;
}

double Simulator::step() {
  if (finished()) return 0.0;
  const double remaining = config_.t_end - state_.t;
  const double dt = (remaining < config_.dt * (1.0 + 1e-9)) ? remaining : config_.dt;

  ensure_flow();

  c_prev_ = state_.c;
  transport_prob_.dt = dt;
  try {
    transport_sol_ = transport_step(transport_prob_, &transport_cache_);
  } catch (const std::exception& e) {
    throw std::runtime_error("[transport] step " + std::to_string(steps_) + ": " + e.what());
  }
  state_.c = transport_sol_.c;
  state_.q = transport_sol_.q;
  state_.chat = transport_sol_.chat;
  state_.t += dt;
  flow_current_ = false;  // flow fields now lag the concentration
  ++steps_;
  return dt;
}

const FieldState& Simulator::state() {
  ensure_flow();
  return state_;
}

// ---------------------------------------------------------------------------
// outputs
// ---------------------------------------------------------------------------

namespace {

std::string fmt_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(const FieldState& state, const QuadMesh& mesh, const ElementTables& tables,
                    const std::string& path_prefix) {
  const int k = tables.k, n1 = k + 1, m = tables.m, ne = mesh.num_elements();
  const int np = ne * m, nc = ne * k * k;

  const std::string vtk_path = path_prefix + ".vtk";
  std::ofstream vtk(vtk_path);
  if (!vtk) throw std::runtime_error("cannot write snapshot: " + vtk_path);
  vtk << "# vtk DataFile Version 3.0\n"
      << "concentration/pressure/velocity samples at t=" << fmt_time(state.t) << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  vtk << "POINTS " << np << " double\n";
  for (int e = 0; e < ne; ++e) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n1; ++a)
        vtk << fmt17(cx + 0.5 * mesh.hx * tables.basis.nodes(a)) << " "
            << fmt17(cy + 0.5 * mesh.hy * tables.basis.nodes(b)) << " 0\n";
  }
  vtk << "CELLS " << nc << " " << 5 * nc << "\n";
  for (int e = 0; e < ne; ++e) {
    const int base = e * m;
    for (int b = 0; b < k; ++b)
      for (int a = 0; a < k; ++a) {
        const int i = base + a + n1 * b;
        vtk << "4 " << i << " " << i + 1 << " " << i + 1 + n1 << " " << i + n1 << "\n";
      }
  }
  vtk << "CELL_TYPES " << nc << "\n";
  for (int i = 0; i < nc; ++i) vtk << "9\n";
  vtk << "POINT_DATA " << np << "\n";
  vtk << "SCALARS concentration double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < m; ++i) vtk << fmt17(state.c(i, e)) << "\n";
  vtk << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < m; ++i) vtk << fmt17(state.p(i, e)) << "\n";
  vtk << "VECTORS velocity double\n";
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < m; ++i)
      vtk << fmt17(state.u(i, e)) << " " << fmt17(state.u(m + i, e)) << " 0\n";
  if (!vtk) throw std::runtime_error("write failed: " + vtk_path);

  const std::string csv_path = path_prefix + ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write snapshot: " + csv_path);
  csv << "x,y,c,p,ux,uy\n";
  for (int e = 0; e < ne; ++e) {
    const double cx = mesh.cx(e), cy = mesh.cy(e);
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n1; ++a) {
        const int i = a + n1 * b;
        csv << fmt17(cx + 0.5 * mesh.hx * tables.basis.nodes(a)) << ","
            << fmt17(cy + 0.5 * mesh.hy * tables.basis.nodes(b)) << "," << fmt17(state.c(i, e))
            << "," << fmt17(state.p(i, e)) << "," << fmt17(state.u(i, e)) << ","
            << fmt17(state.u(m + i, e)) << "\n";
      }
  }
  if (!csv) throw std::runtime_error("write failed: " + csv_path);
}

double sample_concentration(const FieldState& state, const QuadMesh& mesh,
                            const ElementTables& tables, double x, double y) {
  const int n1 = tables.k + 1;
  int ix = static_cast<int>(std::floor((x - mesh.domain.x0) / mesh.hx));
  int iy = static_cast<int>(std::floor((y - mesh.domain.y0) / mesh.hy));
  ix = std::clamp(ix, 0, mesh.nx - 1);
  iy = std::clamp(iy, 0, mesh.ny - 1);
  const int e = mesh.element_id(ix, iy);
  const double xi = 2.0 * (x - mesh.cx(e)) / mesh.hx;
  const double eta = 2.0 * (y - mesh.cy(e)) / mesh.hy;
  const Eigen::Map<const Eigen::MatrixXd> coeffs(state.c.col(e).data(), n1, n1);
  return tensor_eval(tables.basis, coeffs, xi, eta);
}

std::vector<std::pair<double, double>> extract_diagonal_profile(const FieldState& state,
                                                                const QuadMesh& mesh,
                                                                const ElementTables& tables,
                                                                int n_samples) {
  if (std::abs(mesh.domain.width() - mesh.domain.height()) >
      1e-12 * std::max(mesh.domain.width(), mesh.domain.height()))
    throw std::invalid_argument("extract_diagonal_profile: domain must be square");
  std::vector<std::pair<double, double>> prof;
  prof.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double s = mesh.domain.width() * i / (n_samples - 1.0);
    const double x = mesh.domain.x0 + s, y = mesh.domain.y0 + s;
    prof.emplace_back(s, sample_concentration(state, mesh, tables, x, y));
  }
  return prof;
}

// ---------------------------------------------------------------------------
// scenario driver
// ---------------------------------------------------------------------------

namespace {

void write_profile_csv(const std::vector<std::pair<double, double>>& prof,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile: " + path);
  out << "s,c\n";
  for (const auto& [s, c] : prof) out << fmt17(s) << "," << fmt17(c) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool due(double t, double target, double t_end) {
  return std::abs(t - target) <= 1e-9 * std::max(1.0, t_end);
}

}  // namespace

FieldState run(const SimulationConfig& config) {
  config.validate();
  if (config.mode == SimulationConfig::Mode::Manufactured) {
    if (config.nx != config.ny)
      throw std::invalid_argument("manufactured mode needs a square N x N mesh");
    const MmsErrors err = run_mms_single(config.degree, config.nx, config.t_end);
    std::cout << "manufactured solution errors at T=" << fmt_time(config.t_end) << " (k="
              << config.degree << ", N=" << config.nx << "):\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  p %.4e  u %.4e  c %.4e  q %.4e\n", err.p, err.u, err.c,
                  err.q);
    std::cout << buf;
    FieldState empty;
    return empty;
  }

  Simulator sim(config);
  const bool want_output = !config.output_dir.empty() &&
                           (!config.snapshot_times.empty() || !config.profile_times.empty());
  if (want_output) std::filesystem::create_directories(config.output_dir);

  auto emit = [&](double t) {
    if (config.output_dir.empty()) return;
    for (double ts : config.snapshot_times)
      if (due(t, ts, config.t_end))
        write_snapshot(sim.state(), sim.mesh(), sim.tables(),
                       config.output_dir + "/snapshot_" + fmt_time(ts));
    for (double ts : config.profile_times)
      if (due(t, ts, config.t_end)) {
        const auto prof = extract_diagonal_profile(sim.state(), sim.mesh(), sim.tables(),
                                                   config.profile_samples);
        write_profile_csv(prof, config.output_dir + "/profile_" + fmt_time(ts) + ".csv");
      }
  };

  emit(0.0);
  while (!sim.finished()) {
    sim.step();
    emit(sim.time());
  }
  return sim.state();
}

}  // namespace hdgflow
