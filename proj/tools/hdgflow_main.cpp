// Command-line driver: convergence studies, scenario runs, DOF economics,
// and permeability raster ingestion.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "hdgflow/simulation.hpp"
#include "hdgflow/verification.hpp"

namespace {

std::string sci5(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);  // 5 significant digits
  return buf;
}

int cmd_convergence(int kmin, int kmax, int nmax, double T, const std::string& out_csv) {
  std::vector<int> ks, Ns;
  for (int k = kmin; k <= kmax; ++k) ks.push_back(k);
  for (int N = 4; N <= nmax; N *= 2) Ns.push_back(N);
  if (Ns.empty()) {
    std::cerr << "convergence: --nmax must be >= 4\n";
    return 2;
  }
  const hdgflow::ConvergenceReport rep = hdgflow::run_convergence(ks, Ns, T);
  std::cout << rep.text_table();
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) {
      std::cerr << "cannot write " << out_csv << "\n";
      return 1;
    }
    out << rep.csv();
  }
  return 0;
}

int cmd_run(const std::string& config_path) {
  const hdgflow::SimulationConfig cfg = hdgflow::load_config(config_path);
  hdgflow::run(cfg);
  std::cout << "run finished: T=" << cfg.t_end;
  if (!cfg.output_dir.empty()) std::cout << ", outputs in " << cfg.output_dir;
  std::cout << "\n";
  return 0;
}

int cmd_dofs(int dim, int k, int n) {
  if (dim == 2) {
    const auto hdg = hdgflow::hdg_trace_dofs_2d(k, n);
    const auto dg = hdgflow::dg_dofs_2d(k, n);
    std::cout << "HDG trace DOFs: " << hdg << "\n";
    std::cout << "DG DOFs:        " << dg << "\n";
    std::cout << "ratio:          " << sci5(hdgflow::dof_ratio_2d(k, n)) << "\n";
  } else if (dim == 3) {
    const auto hdg = hdgflow::hdg_trace_dofs_3d(k, n);
    const auto dg = hdgflow::dg_dofs_3d(k, n);
    std::cout << "HDG trace DOFs: " << hdg << "\n";
    std::cout << "DG DOFs:        " << dg << "\n";
    std::cout << "ratio:          " << sci5(hdgflow::dof_ratio_3d(k, n)) << "\n";
  } else {
    std::cerr << "dofs: --dim must be 2 or 3\n";
    return 2;
  }
  return 0;
}

int cmd_ingest(const std::string& in_path, const std::string& out_path) {
  const hdgflow::Raster r = hdgflow::load_spe10_slice(in_path);
  hdgflow::write_raster(r, out_path);
  std::cout << "raster: " << r.rows << " x " << r.cols << "\n";
  std::cout << "min K:  " << sci5(r.min()) << "\n";
  std::cout << "max K:  " << sci5(r.max()) << "\n";
  std::cout << "log10 range: " << sci5(std::log10(r.max() / r.min())) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-order HDG simulator for miscible displacement in porous media"};
  app.require_subcommand(1);

  auto* conv = app.add_subcommand("convergence", "Manufactured-solution convergence study");
  int kmin = 1, kmax = 3, nmax = 16;
  double T = 0.1;
  std::string out_csv;
  conv->add_option("--kmin", kmin, "lowest polynomial degree")->required();
  conv->add_option("--kmax", kmax, "highest polynomial degree")->required();
  conv->add_option("--nmax", nmax, "largest N in the 4,8,...,nmax sweep")->required();
  conv->add_option("--T", T, "final time (default 0.1)");
  conv->add_option("--csv", out_csv, "also write the table as CSV");

  auto* runcmd = app.add_subcommand("run", "Run a scenario from a JSON config");
  std::string config_path;
  runcmd->add_option("--config", config_path, "config file")->required();

  auto* dofs = app.add_subcommand("dofs", "DOF counts and HDG/DG ratio");
  int dim = 2, dk = 1, dn = 1;
  dofs->add_option("--dim", dim, "2 or 3")->required();
  dofs->add_option("--k", dk, "polynomial degree")->required();
  dofs->add_option("--n", dn, "elements per direction")->required();

  auto* ingest = app.add_subcommand("ingest-spe10", "Load a permeability slice, resample, write");
  std::string in_path, out_path;
  ingest->add_option("--in", in_path, "input raster")->required();
  ingest->add_option("--out", out_path, "output raster")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (conv->parsed()) return cmd_convergence(kmin, kmax, nmax, T, out_csv);
    if (runcmd->parsed()) return cmd_run(config_path);
    if (dofs->parsed()) return cmd_dofs(dim, dk, dn);
    if (ingest->parsed()) return cmd_ingest(in_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
