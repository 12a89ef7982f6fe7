#pragma once

#include <vector>

#include "robinpq/energy.hpp"
#include "robinpq/problem.hpp"

namespace robinpq {

/// Variational boundary flux: g_i approximates |grad u|^{p-2} d_nu u at
/// boundary vertex i, defined through the boundary-lumped weak residual
/// w_i g_i = \int |grad u|^{p-2} grad u . grad phi_i - F_i.
struct BoundaryFlux {
  std::vector<int> vertices;    // sorted boundary vertex indices
  std::vector<double> values;   // g_i
  std::vector<double> weights;  // lumped boundary measures w_i
};

BoundaryFlux recover_boundary_flux(const ProblemSpec& spec, const DiscreteField& u);

/// Positive prefactor of the Dirichlet-limit expansion:
/// (q-1)/q * sum_i |g_i|^{q/(q-1)} w_i.
double dirichlet_expansion_constant(const BoundaryFlux& flux, double q);

/// Linear slope of the compatible Neumann expansion: (1/q) \int_bnd |u0|^q.
double neumann_slope(const Mesh& mesh, const DiscreteField& u0, double q);

/// Positive prefactor of the incompatible Neumann divergence:
/// (q-1)/q |mass|^{q/(q-1)} / |bnd|^{1/(q-1)}. Throws CompatibleSourceError
/// when the source mean vanishes (no leading term).
double incompat_constant(const ProblemSpec& spec);

struct MinGResult {
  double argmin = 0.0;
  double minimum = 0.0;
};

/// Closed-form minimum of g(t) = (a/q)|t|^q - b t over the reals.
MinGResult min_g(double a, double b, double q);

/// Second-order remainder of the Dirichlet expansion at the extension ubar:
/// (alpha^gamma / p) \int (|grad(u_inf + alpha^{-gamma} ubar)|^p
///                         - |grad u_inf|^p
///                         - p alpha^{-gamma} |grad u_inf|^{p-2} grad u_inf . grad ubar).
double compute_rho_alpha(const ProblemSpec& spec, const DiscreteField& u_inf,
                         const DiscreteField& ubar, double alpha);

/// Harmonic (p=2) extension of per-boundary-vertex values into the interior;
/// the values are given in boundary_vertices() order.
DiscreteField extend_boundary_datum(const MeshPtr& mesh,
                                    const std::vector<double>& boundary_values,
                                    double p);

/// Boundary datum of the Dirichlet-limit corrector: -sgn(g)|g|^{1/(q-1)}
/// per boundary vertex, from the recovered flux.
std::vector<double> dirichlet_corrector_datum(const BoundaryFlux& flux, double q);

}  // namespace robinpq
