#pragma once

#include <cmath>
#include <vector>

#include "robinpq/problem.hpp"

namespace robinpq {

/// Nodal coefficients of a P1 field on a mesh.
struct DiscreteField {
  MeshPtr mesh;
  std::vector<double> values;

  DiscreteField() = default;
  DiscreteField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {}
  static DiscreteField zeros(MeshPtr m) {
    auto n = static_cast<size_t>(m->num_vertices());
    return DiscreteField(std::move(m), std::vector<double>(n, 0.0));
  }
  bool finite() const;
};

// total = bulk + alpha * boundary - source, with boundary already carrying
// the 1/q factor.
struct EnergyBreakdown {
  double bulk = 0.0;      // (1/p) \int |grad u|^p
  double boundary = 0.0;  // (1/q) \int_bnd |u|^q
  double source = 0.0;    // \int f u
  double total = 0.0;
};

/// sign(t) |t|^e, with the removable singularity at t = 0 filled by 0.
inline double sgnpow(double t, double e) {
  return t == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(t), e), t);
}

EnergyBreakdown energy(const ProblemSpec& spec, const LoadVector& load,
                       const DiscreteField& u);
EnergyBreakdown energy(const ProblemSpec& spec, const DiscreteField& u);

/// J(u - t d) - J(u), evaluated through per-cell and per-facet differences
/// (expm1/log1p brackets), so decreases far below the rounding floor of the
/// total energy remain certifiable. Line-search workhorse.
double energy_decrement(const ProblemSpec& spec, const LoadVector& load,
                        const DiscreteField& u, const std::vector<double>& d,
                        double t);

/// Gradient of the discrete total energy: component i is
/// \int |grad u|^{p-2} grad u . grad phi_i + alpha \int_bnd |u|^{q-2} u phi_i - F_i.
/// Cells with an exactly zero gradient contribute nothing (for p < 2 the
/// subgradient contains 0 there).
std::vector<double> residual(const ProblemSpec& spec, const LoadVector& load,
                             const DiscreteField& u);
std::vector<double> residual(const ProblemSpec& spec, const DiscreteField& u);

/// Bulk part of the residual only (no boundary term, no load): used by the
/// variational flux recovery.
std::vector<double> bulk_residual(const Mesh& mesh, const DiscreteField& u, double p);

/// \int_bnd |u|^q ds by the committed facet quadrature (no 1/q factor).
double boundary_q_integral(const Mesh& mesh, const DiscreteField& u, double q);

/// \int_bnd |u+c|^{q-2}(u+c) ds; strictly increasing in c. Used by the
/// Neumann normalization.
double boundary_signed_power_integral(const Mesh& mesh, const DiscreteField& u,
                                      double q, double shift);

double lp_volume_norm(const Mesh& mesh, const DiscreteField& u, double p);
double lp_gradient_norm(const Mesh& mesh, const DiscreteField& u, double p);
double lq_boundary_norm(const Mesh& mesh, const DiscreteField& u, double q);

/// ||u||_Lp / (||grad u||_Lp + ||u||_Lq(bnd)); throws on the zero field.
double poincare_ratio(const Mesh& mesh, const DiscreteField& u, double p, double q);

}  // namespace robinpq
