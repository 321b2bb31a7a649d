#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "hdgflow/condensed.hpp"
#include "hdgflow/element_tables.hpp"
#include "hdgflow/hdg_darcy.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/physics.hpp"

namespace hdgflow {

/// Dense element matrices of the transport system, interior unknowns ordered
/// [q_x | q_y | c] against the element's trace unknowns, plus the
/// per-face stabilization constants used.
struct TransportElementMatrices {
  Eigen::MatrixXd Kee, Kef, Kfe, Kff;
  Eigen::VectorXd Re, Rf;
  std::array<double, 4> tau{};  ///< one constant per local face
};

struct TransportBC {
  enum class Kind {
    Dirichlet,  ///< prescribed trace concentration on boundary faces
    NoFlow      ///< weakly zero total normal flux on boundary faces
  };
  Kind kind = Kind::NoFlow;
  std::function<double(double, double)> dirichlet;  ///< c(x,y) on the boundary
};

/// One implicit Euler step of the transport system. The velocity is the
/// nodal field from the current flow solve; the face convection u.n is taken
/// from the owning element's side. Sources are either well pairs (q^P c on
/// the left, q^I cbar on the right) or a manufactured forcing at t^{n+1}.
struct TransportProblem {
  const QuadMesh* mesh = nullptr;
  const ElementTables* tables = nullptr;
  const FluidModel* fluid = nullptr;
  const Eigen::MatrixXd* velocity = nullptr;  ///< 2m x nE nodal u_h
  const Eigen::MatrixXd* c_prev = nullptr;    ///< m x nE nodal c^n
  double dt = 0.0;
  Eigen::VectorXd q_injection;   ///< per element, may be empty
  Eigen::VectorXd q_production;  ///< per element, may be empty
  double cbar = 1.0;
  std::function<double(double, double)> source_fn;  ///< manufactured forcing
  TransportBC bc;
};

struct TransportCondensed {
  CondensedSystem system;
  std::vector<ElementRecovery> recovery;
};

struct TransportSolution {
  Eigen::MatrixXd q;     ///< 2m x nE
  Eigen::MatrixXd c;     ///< m x nE
  Eigen::VectorXd chat;  ///< (k+1) * n_faces
};

/// Element matrices realizing the transport equations with the trace flux
/// q_hat = q + tau (c - c_hat) n. Throws CoefficientError when the
/// dispersion tensor is singular at a quadrature point.
TransportElementMatrices assemble_transport_local(const TransportProblem& prob, int e);

TransportCondensed condense_transport(const TransportProblem& prob);

void recover_transport(const TransportCondensed& condensed, const ElementTables& tables,
                       const QuadMesh& mesh, const Eigen::VectorXd& chat, Eigen::MatrixXd& q,
                       Eigen::MatrixXd& c);

/// Full step: condensed nonsymmetric skeleton solve plus elementwise recovery.
TransportSolution transport_step(const TransportProblem& prob, CondensedSolver* cache = nullptr);

/// Elementwise L2 projection of c0 plus facewise L2 projection for the trace.
void project_initial_condition(const QuadMesh& mesh, const ElementTables& tables,
                               const std::function<double(double, double)>& c0,
                               Eigen::MatrixXd& c, Eigen::VectorXd& chat);

/// Moments against the face trace basis of the total normal flux
/// (q_hat + u c_hat).n seen from element e, oriented along the stored face
/// normal. Single-valuedness of the numerical flux means the two sides of an
/// interior face return equal vectors.
Eigen::VectorXd transport_flux_moments(const TransportProblem& prob,
                                       const TransportSolution& sol, int e, int face);

/// Global discrete balance: sum_E [ phi (c^{n+1}-c^n)/dt + q^P c^{n+1} - q^I cbar ].
/// Returns the residual and a magnitude scale for relative comparison.
struct BalanceResult {
  double residual = 0.0;
  double scale = 0.0;
};
BalanceResult transport_global_balance(const TransportProblem& prob,
                                       const TransportSolution& sol);

}  // namespace hdgflow
