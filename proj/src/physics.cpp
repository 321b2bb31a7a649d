#include "hdgflow/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdgflow/errors.hpp"

namespace hdgflow {

void FluidModel::validate() const {
  if (!(mu_o > 0.0) || !(mu_s > 0.0))
    throw std::invalid_argument("FluidModel: viscosities must be positive");
  if (d_m < 0.0) throw std::invalid_argument("FluidModel: d_m must be >= 0");
  if (!(alpha_t >= 0.0) || !(alpha_l >= alpha_t))
    throw std::invalid_argument("FluidModel: need 0 <= alpha_t <= alpha_l");
  if (!(phi > 0.0) || phi > 1.0) throw std::invalid_argument("FluidModel: phi must lie in (0,1]");
}

double viscosity(const FluidModel& model, double c) {
  const double cc = std::clamp(c, 0.0, 1.0);
  const double g = cc * std::pow(model.mu_s, -0.25) + (1.0 - cc) * std::pow(model.mu_o, -0.25);
  return 1.0 / (g * g * g * g);
}

double viscosity_derivative(const FluidModel& model, double c) {
  const double ms = std::pow(model.mu_s, -0.25);
  const double mo = std::pow(model.mu_o, -0.25);
  const double g = c * ms + (1.0 - c) * mo;
  return -4.0 * (ms - mo) / (g * g * g * g * g);
}

Eigen::Matrix2d dispersion_tensor(const FluidModel& model, const Eigen::Vector2d& u) {
  const double speed = u.norm();
  Eigen::Matrix2d D = (model.d_m + model.alpha_t * speed) * Eigen::Matrix2d::Identity();
  if (speed >= kVelocityEps)
    D += (model.alpha_l - model.alpha_t) / speed * (u * u.transpose());
  return D;
}

Eigen::Matrix2d dispersion_tensor_inverse(const FluidModel& model, const Eigen::Vector2d& u) {
  const double speed = u.norm();
  if (speed < kVelocityEps) {
    if (model.d_m <= 0.0)
      throw CoefficientError("dispersion_tensor_inverse: singular tensor (d_m = 0, u = 0)");
    return (1.0 / model.d_m) * Eigen::Matrix2d::Identity();
  }
  const double a = model.d_m + model.alpha_t * speed;
  if (a <= 0.0) throw CoefficientError("dispersion_tensor_inverse: singular tensor");
  const double b = (model.alpha_l - model.alpha_t) / speed;
  // Sherman-Morrison for D = a I + b u u^T; a + b|u|^2 = d_m + alpha_l |u|.
  const double denom = a * (a + b * speed * speed);
  return (1.0 / a) * Eigen::Matrix2d::Identity() - (b / denom) * (u * u.transpose());
}

double tensor_inf_norm(const Eigen::Matrix2d& A) {
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

double stabilization_tau(const FluidModel& model, const Eigen::Vector2d& u,
                         const Eigen::Vector2d& n) {
  return std::abs(u.dot(n)) + std::max(tensor_inf_norm(dispersion_tensor(model, u)), 1.0);
}

bool region_is_aligned(const QuadMesh& mesh, const Rect& region) {
  const double tol = 1e-9 * std::max(mesh.hx, mesh.hy);
  const auto on_grid = [tol](double v, double o, double h, double lo, double hi) {
    if (v < lo - tol || v > hi + tol) return false;
    const double r = (v - o) / h;
    return std::abs(r - std::round(r)) * h <= tol;
  };
  return on_grid(region.x0, mesh.domain.x0, mesh.hx, mesh.domain.x0, mesh.domain.x1) &&
         on_grid(region.x1, mesh.domain.x0, mesh.hx, mesh.domain.x0, mesh.domain.x1) &&
         on_grid(region.y0, mesh.domain.y0, mesh.hy, mesh.domain.y0, mesh.domain.y1) &&
         on_grid(region.y1, mesh.domain.y0, mesh.hy, mesh.domain.y0, mesh.domain.y1) &&
         region.width() > 0.0 && region.height() > 0.0;
}

bool element_in_region(const QuadMesh& mesh, int e, const Rect& region) {
  const double x = mesh.cx(e), y = mesh.cy(e);
  return x > region.x0 && x < region.x1 && y > region.y0 && y < region.y1;
}

WellSources well_sources(const QuadMesh& mesh, const WellModel& wells) {
  if (!region_is_aligned(mesh, wells.injection))
    throw MisalignedRegionError("well_sources: injection region is not a union of elements");
  if (!region_is_aligned(mesh, wells.production))
    throw MisalignedRegionError("well_sources: production region is not a union of elements");

  const int ne = mesh.num_elements();
  WellSources s;
  s.q_injection = Eigen::VectorXd::Zero(ne);
  s.q_production = Eigen::VectorXd::Zero(ne);
  int n_inj = 0, n_prod = 0;
  for (int e = 0; e < ne; ++e) {
    if (element_in_region(mesh, e, wells.injection)) ++n_inj;
    if (element_in_region(mesh, e, wells.production)) ++n_prod;
  }
  if (n_inj == 0 || n_prod == 0)
    throw MisalignedRegionError("well_sources: a well region covers no element");
  // Constants chosen so the DISCRETE integrals equal the prescribed rate
  // exactly; this is what makes the pure no-flow Darcy problem solvable.
  const double qi = wells.rate / (n_inj * mesh.element_area());
  const double qp = wells.rate / (n_prod * mesh.element_area());
  for (int e = 0; e < ne; ++e) {
    if (element_in_region(mesh, e, wells.injection)) s.q_injection(e) = qi;
    if (element_in_region(mesh, e, wells.production)) s.q_production(e) = qp;
  }
  return s;
}

}  // namespace hdgflow
