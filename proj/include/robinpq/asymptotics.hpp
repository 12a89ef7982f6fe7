#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "robinpq/problem.hpp"
#include "robinpq/solvers.hpp"

namespace robinpq {

struct SweepRow {
  double alpha = 0.0;
  double energy = 0.0;
  double boundary_q = 0.0;  // \int_bnd |u_alpha|^q (no 1/q)
  long iterations = 0;
  double residual_norm = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::string fingerprint;
};

/// One Robin solve per alpha (strictly increasing grid), warm-started from
/// the previous row by default. Solver failures mark the row failed instead
/// of aborting the sweep. threads > 1 solves cold-started rows concurrently.
SweepTable sweep(const ProblemSpec& spec, const std::vector<double>& alphas,
                 const SolverConfig& cfg, bool warm_start = true, int threads = 1);

void write_sweep_csv(const SweepTable& table, std::ostream& out);

/// E nondecreasing in alpha and divided-difference slopes nonincreasing
/// (concavity), both with the given slack. Returns an empty string on
/// success, a diagnostic otherwise.
std::string check_sweep_monotone_concave(const SweepTable& table, double slack);

/// Row-to-row two-sided bound: (da/q) bq_{i+1} <= E_{i+1} - E_i <= (da/q) bq_i.
std::string check_sweep_sandwich(const SweepTable& table, double q, double slack);

std::vector<double> geometric_grid(double lo, double hi, double ratio);

struct RateFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int first_row = 0;  // inclusive window bounds into the usable rows
  int last_row = 0;
  int used_rows = 0;
};

/// Least-squares line through (log alpha, log sign*(reference - E_alpha)).
/// Rows with a gap below 10x the matching entry of error_floor (when given)
/// or with the wrong sign are excluded. Throws EmptyWindowError when fewer
/// than 3 rows remain.
RateFit fit_power_law(const SweepTable& table, double reference_energy, int sign,
                      const std::vector<double>& error_floor = {});

struct DerivativeCheck {
  double lhs = 0.0;  // centered difference of E in alpha
  double rhs = 0.0;  // (1/q) \int_bnd |u_alpha|^q
  double relative_gap = 0.0;
  bool sandwich_lower_ok = false;  // (delta/q) bnd(u_{a+d}) <= E_{a+d} - E_a
  bool sandwich_upper_ok = false;  // E_{a+d} - E_a <= (delta/q) bnd(u_a)
};

DerivativeCheck check_derivative_identity(const ProblemSpec& spec, double alpha,
                                          double delta, const SolverConfig& cfg);

enum class VerifyRegime { DirichletLimit, NeumannCompatible, NeumannIncompatible };

struct BoundCheck {
  std::string name;
  bool ok = true;
  double worst_violation = 0.0;
};

struct VerificationReport {
  VerifyRegime regime = VerifyRegime::DirichletLimit;
  double reference_energy = 0.0;  // E_inf, E_0, or 0
  double kf = 0.0;                // incompatible regime only
  double predicted_exponent = 0.0;
  double fitted_exponent = 0.0;
  double predicted_constant = 0.0;
  double fitted_constant = 0.0;
  double exponent_tol = 0.0;
  double prefactor_tol = 0.0;
  double r_squared = 0.0;
  bool exponent_ok = false;
  bool prefactor_ok = false;
  bool bounds_ok = false;
  bool pass = false;
  std::vector<BoundCheck> bound_checks;
  SweepTable table;
};

struct VerifyOptions {
  double exponent_tol = 0.05;
  double prefactor_tol = 0.10;
  double bound_slack = 1e-4;
  bool richardson_floor = true;  // estimate the FEM error floor on a coarser mesh
};

/// Run the full pass/fail workflow for one regime: limit solve, sweep,
/// power-law fit against the predicted constant, and the regime's two-sided
/// bounds. Throws RegimeMismatchError when the source mean contradicts the
/// requested regime.
VerificationReport verify_expansion(const ProblemSpec& spec,
                                    const std::vector<double>& alphas,
                                    const SolverConfig& cfg, VerifyRegime regime,
                                    const VerifyOptions& opts = {});

}  // namespace robinpq
