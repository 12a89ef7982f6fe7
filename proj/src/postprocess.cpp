#include "robinpq/postprocess.hpp"

#include <cmath>
#include <stdexcept>

#include "robinpq/errors.hpp"
#include "robinpq/linalg.hpp"

namespace robinpq {

BoundaryFlux recover_boundary_flux(const ProblemSpec& spec, const DiscreteField& u) {
  const Mesh& mesh = *spec.mesh;
  const LoadVector load = assemble_source(mesh, spec.source);
  std::vector<double> r = bulk_residual(mesh, u, spec.p);
  const std::vector<double> w = lumped_boundary_weights(mesh);
  BoundaryFlux flux;
  flux.vertices = mesh.boundary_vertices();
  flux.values.reserve(flux.vertices.size());
  flux.weights.reserve(flux.vertices.size());
  for (int i : flux.vertices) {
    flux.weights.push_back(w[i]);
    flux.values.push_back((r[i] - load.entries[i]) / w[i]);
  }
  return flux;
}

double dirichlet_expansion_constant(const BoundaryFlux& flux, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("q must exceed 1");
  const double e = q / (q - 1.0);
  long double s = 0;
  for (size_t k = 0; k < flux.values.size(); ++k) {
    const double g = std::fabs(flux.values[k]);
    if (g > 0.0) s += std::pow(g, e) * flux.weights[k];
  }
  return (q - 1.0) / q * static_cast<double>(s);
}

double neumann_slope(const Mesh& mesh, const DiscreteField& u0, double q) {
  return boundary_q_integral(mesh, u0, q) / q;
}

double incompat_constant(const ProblemSpec& spec) {
  spec.validate();
  const LoadVector load = assemble_source(*spec.mesh, spec.source);
  const double tol = default_compat_tol(*spec.mesh, load);
  if (classify_regime(load, tol) == Regime::Compatible)
    throw CompatibleSourceError("source mean vanishes: the incompatibility prefactor is undefined");
  const double q = spec.q;
  const double mass = std::fabs(load.total_mass);
  const double perimeter = spec.mesh->boundary_measure();
  return (q - 1.0) / q * std::pow(mass, q / (q - 1.0)) / std::pow(perimeter, 1.0 / (q - 1.0));
}

MinGResult min_g(double a, double b, double q) {
  if (!(a > 0.0)) throw std::invalid_argument("min_g requires a > 0");
  if (!(q > 1.0)) throw std::invalid_argument("min_g requires q > 1");
  MinGResult r;
  if (b == 0.0) return r;
  r.argmin = sgnpow(b / a, 1.0 / (q - 1.0));
  r.minimum = (1.0 - q) / q * std::pow(std::fabs(b), q / (q - 1.0)) / std::pow(a, 1.0 / (q - 1.0));
  return r;
}

double compute_rho_alpha(const ProblemSpec& spec, const DiscreteField& u_inf,
                         const DiscreteField& ubar, double alpha) {
  const Mesh& mesh = *spec.mesh;
  if (!(alpha > 0.0)) throw std::invalid_argument("rho_alpha requires alpha > 0");
  const double p = spec.p;
  const double gamma = 1.0 / (spec.q - 1.0);
  const double eps = std::pow(alpha, -gamma);
  const int nn = mesh.dimension + 1;
  long double acc = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    Vec2 gu{0, 0}, gb{0, 0};
    for (int k = 0; k < nn; ++k) {
      const Vec2& gp = mesh.cell_shape_gradients[c * nn + k];
      gu.x += u_inf.values[v[k]] * gp.x;
      gu.y += u_inf.values[v[k]] * gp.y;
      gb.x += ubar.values[v[k]] * gp.x;
      gb.y += ubar.values[v[k]] * gp.y;
    }
    const double nu = std::hypot(gu.x, gu.y);
    const double npert = std::hypot(gu.x + eps * gb.x, gu.y + eps * gb.y);
    double term = (npert > 0.0 ? std::pow(npert, p) : 0.0) -
                  (nu > 0.0 ? std::pow(nu, p) : 0.0);
    if (nu > 0.0)
      term -= p * eps * std::pow(nu, p - 2.0) * (gu.x * gb.x + gu.y * gb.y);
    acc += static_cast<long double>(term) * mesh.cell_measures[c];
  }
  return static_cast<double>(acc) / (eps * p);
}

DiscreteField extend_boundary_datum(const MeshPtr& mesh,
                                    const std::vector<double>& boundary_values,
                                    double p) {
  (void)p;  // any W^{1,p} extension is admissible; the harmonic one is used
  const std::vector<int> bverts = mesh->boundary_vertices();
  if (boundary_values.size() != bverts.size())
    throw std::invalid_argument("boundary datum length does not match boundary vertex count");
  for (double v : boundary_values)
    if (!std::isfinite(v)) throw std::invalid_argument("boundary datum has nonfinite entries");

  std::vector<double> full(mesh->num_vertices(), 0.0);
  for (size_t k = 0; k < bverts.size(); ++k) full[bverts[k]] = boundary_values[k];
  if (static_cast<int>(bverts.size()) == mesh->num_vertices())
    return DiscreteField(mesh, std::move(full));  // no interior vertices

  // Interior rows of K u = 0 with the boundary pinned to the datum.
  CsrMatrix stiffness = assemble_stiffness(*mesh);
  std::vector<char> keep(mesh->num_vertices(), 1);
  for (int i : bverts) keep[i] = 0;
  std::vector<double> rhs = stiffness.multiply(full);
  for (double& v : rhs) v = -v;
  ReducedSystem rs = restrict_system(stiffness, keep);
  BandedCholesky chol(rs.matrix);
  std::vector<double> rr(rs.full_of_reduced.size());
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k) rr[k] = rhs[rs.full_of_reduced[k]];
  chol.solve_in_place(rr);
  for (size_t k = 0; k < rs.full_of_reduced.size(); ++k) full[rs.full_of_reduced[k]] = rr[k];
  return DiscreteField(mesh, std::move(full));
}

std::vector<double> dirichlet_corrector_datum(const BoundaryFlux& flux, double q) {
  std::vector<double> out(flux.values.size());
  for (size_t k = 0; k < flux.values.size(); ++k)
    out[k] = -sgnpow(flux.values[k], 1.0 / (q - 1.0));
  return out;
}

}  // namespace robinpq
