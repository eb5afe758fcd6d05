#pragma once

#include <string>
#include <vector>

#include "qrcert/npa.hpp"

namespace qrcert {

enum class Sense { Maximize, Minimize };

enum class SolverStatus { Optimal, Infeasible, MaxIterations, NumericalTrouble };

std::string to_string(SolverStatus status);

struct LinearConstraint {
  MomentFunctional functional;
  double rhs = 0.0;
};

/// Optimise a moment functional over the PSD moment matrix of `structure`, with
/// the identity moment pinned to 1. Equalities read f(y) == rhs, inequalities f(y) >= rhs.
struct SdpProblem {
  MomentStructurePtr structure;
  MomentFunctional objective;
  Sense sense = Sense::Maximize;
  std::vector<LinearConstraint> equalities;
  std::vector<LinearConstraint> inequalities;
};

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  /// Fraction of the distance to the cone boundary taken each step.
  double step_fraction = 0.98;
  /// When the iteration can make no further progress, the iterate is still
  /// accepted as Optimal if it meets these looser tolerances.
  double stall_gap_tol = 1e-6;
  double stall_feas_tol = 1e-7;
  /// Iterations without a halving of the worst residual that count as a stall (0 disables).
  int stall_window = 20;
  bool verbose = false;
};

struct SdpSolution {
  SolverStatus status = SolverStatus::NumericalTrouble;
  /// Objective at the moment vector `y`.
  double objective_value = 0.0;
  /// Objective of the dual certificate; bounds the optimum from the other side.
  double dual_value = 0.0;
  Eigen::VectorXd y;
  /// |dual - primal| / max(1, mean magnitude).
  double gap = 0.0;
  /// Relative residual of the moment-matrix equations.
  double primal_infeasibility = 0.0;
  /// Relative residual of the dual equations.
  double dual_infeasibility = 0.0;
  /// l1 norm of the dual equation residual; enters the certified bound.
  double dual_residual_l1 = 0.0;
  int iterations = 0;
  std::vector<double> gap_history;

  bool optimal() const { return status == SolverStatus::Optimal; }
};

/// Infeasible-start primal-dual path following (HKM direction, Mehrotra
/// predictor-corrector). Equalities are eliminated exactly before the solve;
/// inequalities become 1x1 slack blocks.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

/// Plain linear matrix inequality: maximise b.z subject to F0 + sum_k z_k F_k PSD
/// and g0 + G z >= 0. Matrices must be symmetric. `y` of the solution holds z.
struct LmiProblem {
  Eigen::MatrixXd F0;
  std::vector<Eigen::MatrixXd> F;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd g0;
};

SdpSolution solve_lmi(const LmiProblem& problem, const SolverOptions& options = {});

/// Bound on the relaxation optimum that is safe against solver inexactness:
/// an upper bound for maximisation, a lower bound for minimisation. The dual
/// objective is corrected by the dual residual times the moment magnitude bound
/// (every moment of a projector word lies in [-1, 1] on the feasible set).
/// Throws unless the solution is Optimal.
double certify_bound(const SdpProblem& problem, const SdpSolution& solution);

/// Sparse text dump (class matrix plus constraint rows); see docs/formats.md.
std::string dump_problem(const SdpProblem& problem);

/// The equality-reduced LMI in SDPA sparse format, for external cross-checks.
std::string to_sdpa(const SdpProblem& problem);

}  // namespace qrcert
