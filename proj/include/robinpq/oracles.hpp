#pragma once

#include <functional>
#include <optional>

#include "robinpq/postprocess.hpp"
#include "robinpq/problem.hpp"

namespace robinpq {

/// Ground-truth solution of a 1D problem on (a,b), independent of the FEM
/// path: closed forms for p = q = 2 with a constant source, first-integral
/// plus bisection plus adaptive quadrature otherwise.
struct OracleSolution {
  enum class Method { ClosedForm, Quadrature };
  Method method = Method::ClosedForm;

  std::function<double(double)> evaluate;  // the minimizer for the requested setting

  std::optional<double> energy_alpha;      // E_alpha (when alpha > 0)
  std::optional<double> energy_dirichlet;  // E_inf
  std::optional<double> energy_neumann;    // E_0 (zero-mean sources)
  std::optional<double> energy_kf;         // K_f

  // Nonlinear flux sigma = |u'|^{p-2} u' at the endpoints.
  double flux_left = 0.0, flux_right = 0.0;                      // of the requested solution
  double dirichlet_flux_left = 0.0, dirichlet_flux_right = 0.0;  // of u_inf

  long quadrature_evals = 0;  // committed node count, for reproducibility
};

/// p = q = 2, source f = c: exact closed form.
OracleSolution oracle_1d_linear(double a, double b, double alpha, double c);

/// General p, q > 1, polynomial source; alpha = 0 requires zero mean and
/// returns the normalized Neumann solution. Throws OracleError when
/// root-finding cannot bracket.
OracleSolution oracle_1d_general_p(double a, double b, double p, double q,
                                   double alpha, const SourceTerm& source,
                                   double quad_tol = 1e-12);

/// Golden-section search oracle for min_g.
MinGResult brute_min_g(double a, double b, double q);

/// (q-1)/q (|sigma_inf(a)|^{q/(q-1)} + |sigma_inf(b)|^{q/(q-1)}): the
/// Dirichlet expansion prefactor from the oracle's endpoint fluxes.
double oracle_dirichlet_prefactor(const OracleSolution& sol, double q);

}  // namespace robinpq
