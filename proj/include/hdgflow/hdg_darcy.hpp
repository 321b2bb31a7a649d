#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hdgflow/condensed.hpp"
#include "hdgflow/element_tables.hpp"
#include "hdgflow/mesh.hpp"
#include "hdgflow/physics.hpp"

namespace hdgflow {

/// Dense element matrices of the flow system, interior unknowns ordered
/// [u_x | u_y | p] (3m) against the element's 4(k+1) trace unknowns.
struct DarcyElementMatrices {
  Eigen::MatrixXd Kee;  ///< 3m x 3m interior block
  Eigen::MatrixXd Kef;  ///< 3m x 4(k+1) trace coupling
  Eigen::MatrixXd Kfe;  ///< 4(k+1) x 3m flux-continuity rows
  Eigen::MatrixXd Kff;  ///< 4(k+1) x 4(k+1)
  Eigen::VectorXd Re;   ///< interior right-hand side
  Eigen::VectorXd Rf;   ///< trace right-hand side
};

/// Applied inverse of the interior block: recovery is x = x2 - Y * trace.
struct ElementRecovery {
  Eigen::MatrixXd Y;
  Eigen::VectorXd x2;
};

struct DarcyBC {
  enum class Kind {
    Dirichlet,  ///< prescribed trace pressure on boundary faces
    NoFlowPin   ///< weakly zero normal flux; first trace DOF pinned to 0
  };
  Kind kind = Kind::NoFlowPin;
  std::function<double(double, double)> dirichlet;  ///< p(x,y) on the boundary
};

/// Everything the flow assembly needs. The source is either one constant per
/// element (wells) or a function of position (manufactured forcing).
struct DarcyProblem {
  const QuadMesh* mesh = nullptr;
  const ElementTables* tables = nullptr;
  const Eigen::VectorXd* K = nullptr;      ///< per-element permeability
  const FluidModel* fluid = nullptr;
  const Eigen::MatrixXd* conc = nullptr;   ///< m x nE nodal concentration
  Eigen::VectorXd source_const;            ///< per-element q^I - q^P
  std::function<double(double, double)> source_fn;
  DarcyBC bc;
};

struct DarcyCondensed {
  CondensedSystem system;
  std::vector<ElementRecovery> recovery;
};

/// Flow solution. The pressure unknowns are solved in mobility-scaled form
/// P = pressure_scale * p (pressure_scale = max K / mu(0)), which keeps the
/// unit trace stabilization commensurate with the velocity and the skeleton
/// system well conditioned for strongly heterogeneous, small-K data.
/// Conservation and flux checks work on the scaled fields; physical
/// pressures come from physical_p() / physical_phat().
struct DarcySolution {
  Eigen::MatrixXd u;            ///< 2m x nE, rows [u_x | u_y]
  Eigen::MatrixXd p_scaled;     ///< m x nE
  Eigen::VectorXd phat_scaled;  ///< (k+1) * n_faces
  double pressure_scale = 1.0;

  Eigen::MatrixXd physical_p() const { return p_scaled / pressure_scale; }
  Eigen::VectorXd physical_phat() const { return phat_scaled / pressure_scale; }
};

/// max_e K_e / mu(c = 0).
double darcy_pressure_scale(const DarcyProblem& prob);

/// Element matrices realizing the flow equations with the trace substitution
/// u_hat = u + (p - p_hat) n. Throws CoefficientError for K <= 0.
DarcyElementMatrices assemble_darcy_local(const DarcyProblem& prob, int e);

/// Element-by-element Schur complements accumulated into the skeleton system,
/// with boundary constraints attached per prob.bc.
DarcyCondensed condense_darcy(const DarcyProblem& prob);

/// Back-substitute interior unknowns from the solved traces.
void recover_interior(const DarcyCondensed& condensed, const ElementTables& tables,
                      const QuadMesh& mesh, const Eigen::VectorXd& phat, Eigen::MatrixXd& u,
                      Eigen::MatrixXd& p);

/// assemble -> condense -> solve -> recover.
DarcySolution darcy_solve(const DarcyProblem& prob, CondensedSolver* cache = nullptr);

/// L2 projection of g onto the trace space of one face.
Eigen::VectorXd project_face(const QuadMesh& mesh, const ElementTables& tables, int face,
                             const std::function<double(double, double)>& g);

/// Per-element residual of the local flux balance: integral of u_hat.n over
/// the element boundary minus the integral of the source.
Eigen::VectorXd darcy_local_conservation(const DarcyProblem& prob, const DarcySolution& sol);

/// u_hat.n on face `face` seen from element `e`, sampled at the face
/// quadrature points (oriented along the stored face normal).
Eigen::VectorXd darcy_trace_flux(const ElementTables& tables, const QuadMesh& mesh,
                                 const DarcySolution& sol, int e, int face);

}  // namespace hdgflow
