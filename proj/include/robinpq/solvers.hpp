#pragma once

#include <string>
#include <vector>

#include "robinpq/energy.hpp"
#include "robinpq/problem.hpp"

namespace robinpq {

enum class SolveSetting { Robin, Dirichlet, NeumannNormalized, KfConstrained };
enum class SolveStatus { Converged, MaxIterationsExceeded };

struct SolverConfig {
  double gradient_tol = 1e-10;  // absolute, scaled by the load max-norm
  long max_iterations = 100000;
  double contraction = 0.5;         // line-search backtracking factor
  double sufficient_decrease = 1e-4;  // Armijo constant
  bool exact_linear_p2 = true;      // direct solve of the linear optimality system when p = 2 (and q = 2 for Robin)
  bool preconditioned = true;       // descent metric: p=2 stiffness (+ alpha boundary mass); plain gradient otherwise
  bool record_energy_trace = false;

  void validate() const;
};

struct Solution {
  DiscreteField field;
  EnergyBreakdown energy;  // evaluated with the setting's own objective
  long iterations = 0;
  double residual_norm = 0.0;  // max-norm, projected onto the feasible set
  SolveSetting setting = SolveSetting::Robin;
  SolveStatus status = SolveStatus::Converged;
  std::string diagnostic;
  std::vector<double> energy_trace;  // per accepted step, when recorded
};

/// Minimize the full Robin energy J_alpha; requires spec.alpha > 0.
Solution solve_robin(const ProblemSpec& spec, const SolverConfig& cfg,
                     const DiscreteField* start = nullptr);

/// Minimize bulk - source over fields vanishing on the boundary (E_inf).
Solution solve_dirichlet(const ProblemSpec& spec, const SolverConfig& cfg,
                         const DiscreteField* start = nullptr);

/// Minimize bulk - source for a zero-mean source, then fix the constant
/// gauge so that \int_bnd |u|^{q-2} u ds = 0 (E_0). Throws
/// IncompatibleSourceError when the source has nonzero mean.
Solution solve_neumann_normalized(const ProblemSpec& spec, const SolverConfig& cfg,
                                  const DiscreteField* start = nullptr);

/// Minimize bulk - source subject to \int_bnd v ds = 0 (K_f).
Solution solve_kf(const ProblemSpec& spec, const SolverConfig& cfg,
                  const DiscreteField* start = nullptr);

}  // namespace robinpq
