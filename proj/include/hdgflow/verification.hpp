#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hdgflow/hdg_darcy.hpp"
#include "hdgflow/hdg_transport.hpp"
#include "hdgflow/physics.hpp"

namespace hdgflow {

/// Manufactured problem on the unit square:
///   p = 1 + x y tanh(1-x) tanh(1-y) exp(-t)
///   c = cos(t) sin(pi x) sin(pi y) / (2 pi)^2
/// with K = 9.44e-3, mobility ratio 2 (mu_s = 1), phi = 0.2, d_m = 1,
/// alpha_t = 1.8e-6, alpha_l = 1.8e-5. The forcings are closed-form
/// compositions of the exact derivative chain; substituting the exact fields
/// into the model equations with these forcings leaves zero residual.
struct MmsProblem {
  FluidModel fluid;
  double K = 9.44e-3;

  double p(double x, double y, double t) const;
  double c(double x, double y, double t) const;
  Eigen::Vector2d velocity(double x, double y, double t) const;
  Eigen::Vector2d flux(double x, double y, double t) const;  ///< q = -D(u) grad c
  double flow_forcing(double x, double y, double t) const;   ///< div u
  /// phi c_t + div(u c - D(u) grad c)
  double transport_forcing(double x, double y, double t) const;
};

MmsProblem build_mms_forcing();

struct MmsErrors {
  double p = 0.0, u = 0.0, c = 0.0, q = 0.0;
};

/// One manufactured run: N x N mesh of the unit square, degree k,
/// dt = 0.1 / ((k+1) N^k), implicit Euler to time T, Dirichlet traces from
/// the exact fields. L2 errors at T with (k+2)-point quadrature.
MmsErrors run_mms_single(int k, int N, double T);

struct ConvergenceRow {
  int k = 0, N = 0;
  MmsErrors err;
  MmsErrors rate;      ///< log2(e_N / e_2N) against the previous row
  bool has_rate = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::string text_table() const;
  std::string csv() const;
};

/// Sweep k in k_list and N in N_list (rates between consecutive N pairs).
ConvergenceReport run_convergence(const std::vector<int>& k_list, const std::vector<int>& N_list,
                                  double T);

// ---- degree-of-freedom economics ----

std::int64_t hdg_trace_dofs_2d(int k, int N);  ///< (k+1)(2N^2+2N)
std::int64_t dg_dofs_2d(int k, int N);         ///< (k+1)^2 N^2
std::int64_t hdg_trace_dofs_3d(int k, int N);  ///< (k+2)(k+1)(6N^3+2N^2)/2
std::int64_t dg_dofs_3d(int k, int N);         ///< 5(k+3)(k+2)(k+1)N^3/6
double dof_ratio_2d(int k, int N);
double dof_ratio_3d(int k, int N);

/// Brute-force count of the trace space of an actually constructed mesh.
std::int64_t enumerate_trace_dofs(const QuadMesh& mesh, int k);

// ---- conservation reporting ----

struct MassBalanceReport {
  Eigen::VectorXd darcy_element_residual;  ///< boundary flux minus source, per element
  double darcy_source_scale = 0.0;         ///< max element |integral of source|
  double darcy_global_residual = 0.0;      ///< sum of element residuals
  double darcy_source_imbalance = 0.0;     ///< integral of q^I - q^P over the domain
  double darcy_boundary_outflow = 0.0;     ///< total u_hat.n over the domain boundary
  double transport_residual = 0.0;
  double transport_scale = 0.0;
};

/// Conservation residuals of one completed step: the flow fields that drove
/// the step and the transport fields it produced.
MassBalanceReport mass_balance_report(const DarcyProblem& flow, const DarcySolution& flow_sol,
                                      const TransportProblem& transport,
                                      const TransportSolution& transport_sol);

}  // namespace hdgflow
