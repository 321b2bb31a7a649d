#pragma once

#include <Eigen/Dense>

#include "hdgflow/mesh.hpp"

namespace hdgflow {

/// Fluid and medium constants shared by flow and transport.
struct FluidModel {
  double mu_o = 2.0;      ///< resident fluid viscosity
  double mu_s = 1.0;      ///< solvent viscosity
  double phi = 0.2;       ///< porosity, in (0,1]
  double d_m = 1e-9;      ///< molecular diffusivity
  double alpha_t = 1.8e-6;  ///< transverse dispersivity
  double alpha_l = 1.8e-5;  ///< longitudinal dispersivity

  void validate() const;
};

/// Per-element scalar permeability, strictly positive.
struct PermeabilityField {
  Eigen::VectorXd K;  ///< one value per element
};

/// Compact-support injection/production well pair.
struct WellModel {
  Rect injection;
  Rect production;
  double rate = 0.0;        ///< Q: discrete integral of q^I and of q^P
  double injected_conc = 1.0;  ///< cbar
};

/// Piecewise-constant discrete sources, one pair per element.
struct WellSources {
  Eigen::VectorXd q_injection;   ///< q^I_e
  Eigen::VectorXd q_production;  ///< q^P_e
};

/// Quarter-power mixing law; c is clamped to [0,1] before evaluation.
double viscosity(const FluidModel& model, double c);

/// d(mu)/dc of the unclamped law (used by manufactured forcings).
double viscosity_derivative(const FluidModel& model, double c);

/// Velocity regularization threshold below which D(u) collapses to d_m I.
inline constexpr double kVelocityEps = 1e-12;

/// Dispersion-diffusion tensor D(u).
Eigen::Matrix2d dispersion_tensor(const FluidModel& model, const Eigen::Vector2d& u);

/// Closed-form inverse of D(u); throws CoefficientError when D is singular
/// (d_m = 0 and |u| below the regularization threshold).
Eigen::Matrix2d dispersion_tensor_inverse(const FluidModel& model, const Eigen::Vector2d& u);

/// Max-absolute-row-sum norm of a 2x2 tensor.
double tensor_inf_norm(const Eigen::Matrix2d& A);

/// Transport stabilization tau = |u.n| + max(||D(u)||_inf, 1); n must be unit.
double stabilization_tau(const FluidModel& model, const Eigen::Vector2d& u,
                         const Eigen::Vector2d& n);

/// Piecewise-constant well sources with discrete integrals equal to
/// wells.rate on both regions. Regions must be unions of whole elements;
/// otherwise MisalignedRegionError.
WellSources well_sources(const QuadMesh& mesh, const WellModel& wells);

/// True when `region` is a union of whole mesh elements (within a relative
/// snap tolerance) and lies inside the domain.
bool region_is_aligned(const QuadMesh& mesh, const Rect& region);

/// True when element e's box lies inside the (aligned) region.
bool element_in_region(const QuadMesh& mesh, int e, const Rect& region);

}  // namespace hdgflow
