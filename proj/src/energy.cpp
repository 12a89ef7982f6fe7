#include "robinpq/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "robinpq/quadrature.hpp"

namespace robinpq {

bool DiscreteField::finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

void check_field(const Mesh& mesh, const DiscreteField& u) {
  if (static_cast<int>(u.values.size()) != mesh.num_vertices())
    throw std::invalid_argument("field length does not match mesh vertex count");
}

// Cellwise constant gradient of the P1 field.
Vec2 cell_gradient(const Mesh& mesh, const DiscreteField& u, int c) {
  auto v = mesh.cell(c);
  Vec2 g{0.0, 0.0};
  for (int k = 0; k <= mesh.dimension; ++k) {
    const Vec2& gp = mesh.cell_shape_gradients[c * (mesh.dimension + 1) + k];
    g.x += u.values[v[k]] * gp.x;
    g.y += u.values[v[k]] * gp.y;
  }
  return g;
}

double norm2(const Vec2& g) { return std::sqrt(g.x * g.x + g.y * g.y); }

}  // namespace

EnergyBreakdown energy(const ProblemSpec& spec, const LoadVector& load,
                       const DiscreteField& u) {
  const Mesh& mesh = *spec.mesh;
  check_field(mesh, u);
  long double bulk = 0, boundary = 0, source = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double g = norm2(cell_gradient(mesh, u, c));
    if (g > 0.0) bulk += std::pow(g, spec.p) * mesh.cell_measures[c];
  }
  bulk /= spec.p;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto fv = mesh.facet(f);
    for_each_facet_point(mesh, f, [&](const FacetQuadPoint& pt) {
      double val = 0;
      for (int k = 0; k < mesh.dimension; ++k) val += u.values[fv[k]] * pt.shape[k];
      if (val != 0.0) boundary += std::pow(std::fabs(val), spec.q) * pt.weight;
    });
  }
  boundary /= spec.q;
  for (int i = 0; i < mesh.num_vertices(); ++i)
    source += static_cast<long double>(load.entries[i]) * u.values[i];

  EnergyBreakdown e;
  e.bulk = static_cast<double>(bulk);
  e.boundary = static_cast<double>(boundary);
  e.source = static_cast<double>(source);
  e.total = static_cast<double>(bulk + spec.alpha * boundary - source);
  return e;
}

EnergyBreakdown energy(const ProblemSpec& spec, const DiscreteField& u) {
  return energy(spec, assemble_source(*spec.mesh, spec.source), u);
}

namespace {

// |base - shift|^e - |base|^e without cancellation: the relative change
// delta = (|base - shift|^2 - |base|^2) / |base|^2 is formed from the cross
// terms, then pushed through expm1(e/2 log1p(delta)).
double power_bracket_1d(double base, double shift, double e) {
  if (base == 0.0) return shift == 0.0 ? 0.0 : std::pow(std::fabs(shift), e);
  const double delta = (shift * shift - 2.0 * base * shift) / (base * base);
  if (std::fabs(delta) < 0.5)
    return std::pow(std::fabs(base), e) * std::expm1(0.5 * e * std::log1p(delta));
  const double moved = std::fabs(base - shift);
  return (moved == 0.0 ? 0.0 : std::pow(moved, e)) - std::pow(std::fabs(base), e);
}

double power_bracket_2d(const Vec2& base, const Vec2& shift, double e) {
  const double b2 = base.x * base.x + base.y * base.y;
  if (b2 == 0.0) {
    const double s = std::hypot(shift.x, shift.y);
    return s == 0.0 ? 0.0 : std::pow(s, e);
  }
  const double cross = shift.x * shift.x + shift.y * shift.y -
                       2.0 * (base.x * shift.x + base.y * shift.y);
  const double delta = cross / b2;
  if (std::fabs(delta) < 0.5)
    return std::pow(b2, 0.5 * e) * std::expm1(0.5 * e * std::log1p(delta));
  const double moved = std::hypot(base.x - shift.x, base.y - shift.y);
  return (moved == 0.0 ? 0.0 : std::pow(moved, e)) - std::pow(b2, 0.5 * e);
}

}  // namespace

double energy_decrement(const ProblemSpec& spec, const LoadVector& load,
                        const DiscreteField& u, const std::vector<double>& d,
                        double t) {
  const Mesh& mesh = *spec.mesh;
  check_field(mesh, u);
  if (d.size() != u.values.size())
    throw std::invalid_argument("direction length does not match the field");
  const int nn = mesh.dimension + 1;
  long double acc = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    Vec2 gu{0, 0}, gd{0, 0};
    for (int k = 0; k < nn; ++k) {
      const Vec2& gp = mesh.cell_shape_gradients[c * nn + k];
      gu.x += u.values[v[k]] * gp.x;
      gu.y += u.values[v[k]] * gp.y;
      gd.x += d[v[k]] * gp.x;
      gd.y += d[v[k]] * gp.y;
    }
    const Vec2 shift{t * gd.x, t * gd.y};
    acc += static_cast<long double>(power_bracket_2d(gu, shift, spec.p)) *
           mesh.cell_measures[c] / spec.p;
  }
  if (spec.alpha != 0.0) {
    for (int f = 0; f < mesh.num_facets(); ++f) {
      auto fv = mesh.facet(f);
      for_each_facet_point(mesh, f, [&](const FacetQuadPoint& pt) {
        double a = 0, b = 0;
        for (int k = 0; k < mesh.dimension; ++k) {
          a += u.values[fv[k]] * pt.shape[k];
          b += d[fv[k]] * pt.shape[k];
        }
        acc += static_cast<long double>(power_bracket_1d(a, t * b, spec.q)) *
               pt.weight * spec.alpha / spec.q;
      });
    }
  }
  long double src = 0;
  for (size_t i = 0; i < d.size(); ++i)
    src += static_cast<long double>(load.entries[i]) * d[i];
  acc += static_cast<long double>(t) * src;
  return static_cast<double>(acc);
}

std::vector<double> bulk_residual(const Mesh& mesh, const DiscreteField& u, double p) {
  check_field(mesh, u);
  std::vector<long double> acc(mesh.num_vertices(), 0.0L);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec2 g = cell_gradient(mesh, u, c);
    const double gn = norm2(g);
    if (gn == 0.0) continue;
    const double w = std::pow(gn, p - 2.0) * mesh.cell_measures[c];
    auto v = mesh.cell(c);
    for (int k = 0; k <= mesh.dimension; ++k) {
      const Vec2& gp = mesh.cell_shape_gradients[c * (mesh.dimension + 1) + k];
      acc[v[k]] += static_cast<long double>(w) * (g.x * gp.x + g.y * gp.y);
    }
  }
  std::vector<double> out(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) out[i] = static_cast<double>(acc[i]);
  return out;
}

std::vector<double> residual(const ProblemSpec& spec, const LoadVector& load,
                             const DiscreteField& u) {
  const Mesh& mesh = *spec.mesh;
  std::vector<double> r = bulk_residual(mesh, u, spec.p);
  if (spec.alpha != 0.0) {
    for (int f = 0; f < mesh.num_facets(); ++f) {
      auto fv = mesh.facet(f);
      for_each_facet_point(mesh, f, [&](const FacetQuadPoint& pt) {
        double val = 0;
        for (int k = 0; k < mesh.dimension; ++k) val += u.values[fv[k]] * pt.shape[k];
        const double s = spec.alpha * sgnpow(val, spec.q - 1.0) * pt.weight;
        for (int k = 0; k < mesh.dimension; ++k) r[fv[k]] += s * pt.shape[k];
      });
    }
  }
  for (int i = 0; i < mesh.num_vertices(); ++i) r[i] -= load.entries[i];
  return r;
}

std::vector<double> residual(const ProblemSpec& spec, const DiscreteField& u) {
  return residual(spec, assemble_source(*spec.mesh, spec.source), u);
}

double boundary_q_integral(const Mesh& mesh, const DiscreteField& u, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("q must exceed 1");
  check_field(mesh, u);
  long double s = 0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto fv = mesh.facet(f);
    for_each_facet_point(mesh, f, [&](const FacetQuadPoint& pt) {
      double val = 0;
      for (int k = 0; k < mesh.dimension; ++k) val += u.values[fv[k]] * pt.shape[k];
      if (val != 0.0) s += std::pow(std::fabs(val), q) * pt.weight;
    });
  }
  return static_cast<double>(s);
}

double boundary_signed_power_integral(const Mesh& mesh, const DiscreteField& u,
                                      double q, double shift) {
  check_field(mesh, u);
  long double s = 0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto fv = mesh.facet(f);
    for_each_facet_point(mesh, f, [&](const FacetQuadPoint& pt) {
      double val = shift;
      for (int k = 0; k < mesh.dimension; ++k) val += u.values[fv[k]] * pt.shape[k];
      s += sgnpow(val, q - 1.0) * pt.weight;
    });
  }
  return static_cast<double>(s);
}

double lp_volume_norm(const Mesh& mesh, const DiscreteField& u, double p) {
  check_field(mesh, u);
  long double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    for_each_cell_point(mesh, c, [&](const CellQuadPoint& pt) {
      double val = 0;
      for (int k = 0; k <= mesh.dimension; ++k) val += u.values[v[k]] * pt.shape[k];
      if (val != 0.0) s += std::pow(std::fabs(val), p) * pt.weight;
    });
  }
  return std::pow(static_cast<double>(s), 1.0 / p);
}

double lp_gradient_norm(const Mesh& mesh, const DiscreteField& u, double p) {
  check_field(mesh, u);
  long double s = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double g = norm2(cell_gradient(mesh, u, c));
    if (g > 0.0) s += std::pow(g, p) * mesh.cell_measures[c];
  }
  return std::pow(static_cast<double>(s), 1.0 / p);
}

double lq_boundary_norm(const Mesh& mesh, const DiscreteField& u, double q) {
  return std::pow(boundary_q_integral(mesh, u, q), 1.0 / q);
}

double poincare_ratio(const Mesh& mesh, const DiscreteField& u, double p, double q) {
  bool all_zero = true;
  for (double v : u.values)
    if (v != 0.0) { all_zero = false; break; }
  if (all_zero) throw std::invalid_argument("poincare_ratio is undefined for the zero field");
  const double denom = lp_gradient_norm(mesh, u, p) + lq_boundary_norm(mesh, u, q);
  return lp_volume_norm(mesh, u, p) / denom;
}

}  // namespace robinpq
