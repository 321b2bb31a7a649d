#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hdgflow/element_tables.hpp"
#include "hdgflow/hdg_darcy.hpp"
#include "hdgflow/hdg_transport.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/physics.hpp"

namespace hdgflow {

/// Plain-text permeability raster: first line "rows cols", then row-major
/// whitespace-separated linear permeabilities. Row r corresponds to the r-th
/// element row from the bottom of the domain, column c to the c-th element
/// column from the left.
struct Raster {
  int rows = 0, cols = 0;
  Eigen::MatrixXd values;  ///< rows x cols, all positive
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
};

Raster read_raster(const std::string& path);
void write_raster(const Raster& raster, const std::string& path);

/// Nearest-neighbor resampling on cell centers.
Raster resample_nearest(const Raster& in, int rows, int cols);

/// Read a permeability slice; a native 60 x 220 slice is resampled to
/// 64 x 64, anything else is returned as stored. Values must be positive.
Raster load_spe10_slice(const std::string& path);

struct PermeabilitySpec {
  enum class Type { Constant, Lens, RasterFile };
  Type type = Type::Constant;
  double value = 1e-10;       ///< Constant: everywhere; Lens: background
  double lens_value = 1e-13;  ///< Lens: value inside the region
  Rect lens_region;
  std::string raster_path;
};

/// Scenario description; see README for the JSON schema.
struct SimulationConfig {
  int nx = 16, ny = 16;
  Rect domain{0.0, 1000.0, 0.0, 1000.0};
  int degree = 4;
  FluidModel fluid;
  PermeabilitySpec permeability;
  WellModel wells;
  double dt = 0.1;
  double t_end = 10.0;
  std::string output_dir;
  std::vector<double> snapshot_times;
  std::vector<double> profile_times;
  int profile_samples = 256;
  enum class Mode { Wells, Manufactured };
  Mode mode = Mode::Wells;

  void validate() const;
};

/// Parse the JSON config; unknown keys are errors.
SimulationConfig load_config(const std::string& path);

/// Discrete state at time t: the flow fields are the ones obtained from the
/// concentration of the same time level.
struct FieldState {
  double t = 0.0;
  Eigen::MatrixXd c;     ///< m x nE
  Eigen::MatrixXd q;     ///< 2m x nE
  Eigen::MatrixXd p;     ///< m x nE
  Eigen::MatrixXd u;     ///< 2m x nE
  Eigen::VectorXd chat;  ///< (k+1) * n_faces
  Eigen::VectorXd phat;

  void check_sizes(const QuadMesh& mesh, int k) const;
};

PermeabilityField build_permeability(const SimulationConfig& config, const QuadMesh& mesh);

/// Semi-implicit time stepping: per step a flow solve with mu(c^n) followed
/// by one implicit transport step with the frozen velocity.
class Simulator {
 public:
  explicit Simulator(const SimulationConfig& config);

  /// Advance one step of size min(dt, t_end - t). Returns the step size.
  double step();

  int steps_taken() const { return steps_; }
  double time() const { return state_.t; }
  bool finished() const;

  /// State at the current time; flow fields are refreshed from the current
  /// concentration on demand.
  const FieldState& state();

  const QuadMesh& mesh() const { return mesh_; }
  const ElementTables& tables() const { return tables_; }
  const FluidModel& fluid() const { return config_.fluid; }
  const WellSources& sources() const { return sources_; }
  const SimulationConfig& config() const { return config_; }

  /// Ingredients of the last completed step, for conservation reporting.
  const DarcyProblem& last_flow_problem() const { return flow_prob_; }
  const DarcySolution& last_flow_solution() const { return flow_sol_; }
  const TransportProblem& last_transport_problem() const { return transport_prob_; }
  const TransportSolution& last_transport_solution() const { return transport_sol_; }
  const Eigen::MatrixXd& prev_concentration() const { return c_prev_; }

 private:
  void ensure_flow();

  SimulationConfig config_;
  QuadMesh mesh_;
  ElementTables tables_;
  PermeabilityField perm_;
  WellSources sources_;
  FieldState state_;
  Eigen::MatrixXd c_prev_;
  DarcyProblem flow_prob_;
  DarcySolution flow_sol_;
  TransportProblem transport_prob_;
  TransportSolution transport_sol_;
  CondensedSolver flow_cache_, transport_cache_;
  bool flow_current_ = false;
  int steps_ = 0;
};

/// Run the configured scenario, writing snapshots and profiles; returns the
/// final state. Solver failures are rethrown with the step index and phase.
FieldState run(const SimulationConfig& config);

/// Legacy-VTK unstructured grid plus a CSV sidecar of the same samples,
/// taken on the per-element GLL grid.
void write_snapshot(const FieldState& state, const QuadMesh& mesh, const ElementTables& tables,
                    const std::string& path_prefix);

/// c_h sampled at n points along the diagonal y = x of a square domain.
std::vector<std::pair<double, double>> extract_diagonal_profile(const FieldState& state,
                                                                const QuadMesh& mesh,
                                                                const ElementTables& tables,
                                                                int n_samples);

/// Evaluate the stored concentration at an arbitrary point.
double sample_concentration(const FieldState& state, const QuadMesh& mesh,
                            const ElementTables& tables, double x, double y);

}  // namespace hdgflow
