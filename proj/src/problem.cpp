#include "robinpq/problem.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "robinpq/quadrature.hpp"

namespace robinpq {

void validate_source(const Mesh& mesh, const SourceTerm& source) {
  if (const auto* poly = std::get_if<SourcePolynomial>(&source)) {
    for (const auto& t : poly->terms) {
      if (t.ex < 0 || t.ex > 3 || t.ey < 0 || t.ey > 3)
        throw std::invalid_argument("polynomial source degree must be between 0 and 3 per coordinate");
      if (mesh.dimension == 1 && t.ey != 0)
        throw std::invalid_argument("1D polynomial source cannot depend on y");
    }
  } else if (const auto* nodal = std::get_if<SourceNodal>(&source)) {
    if (static_cast<int>(nodal->values.size()) != mesh.num_vertices())
      throw std::invalid_argument("nodal source length " + std::to_string(nodal->values.size()) +
                                  " does not match vertex count " + std::to_string(mesh.num_vertices()));
  }
}

std::string describe_source(const SourceTerm& source) {
  std::ostringstream os;
  if (const auto* c = std::get_if<SourceConstant>(&source)) {
    os << "const(" << c->value << ")";
  } else if (const auto* poly = std::get_if<SourcePolynomial>(&source)) {
    os << "poly(";
    bool first = true;
    for (const auto& t : poly->terms) {
      if (!first) os << "+";
      os << t.c << "x^" << t.ex;
      if (t.ey) os << "y^" << t.ey;
      first = false;
    }
    os << ")";
  } else {
    os << "nodal[" << std::get<SourceNodal>(source).values.size() << "]";
  }
  return os.str();
}

void ProblemSpec::validate() const {
  if (!mesh) throw std::invalid_argument("problem has no mesh");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(q > 1.0)) throw std::invalid_argument("q must exceed 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative (the energy is -inf for alpha < 0)");
  validate_source(*mesh, source);
}

std::string ProblemSpec::fingerprint() const {
  std::ostringstream os;
  const auto& pv = mesh->provenance;
  switch (pv.family) {
    case MeshFamily::Interval:
      os << "interval[" << pv.a << "," << pv.b << "]x" << pv.n;
      break;
    case MeshFamily::Rectangle:
      os << "rect[" << pv.lx << "," << pv.ly << "]x" << pv.nx << "x" << pv.ny;
      break;
    case MeshFamily::Imported:
      os << "imported(v=" << mesh->num_vertices() << ",c=" << mesh->num_cells() << ")";
      break;
  }
  os << "|p=" << p << "|q=" << q << "|src=" << describe_source(source);
  return os.str();
}

namespace {

double eval_source_at(const SourceTerm& source, const Mesh& mesh, int cell,
                      const CellQuadPoint& pt) {
  if (const auto* c = std::get_if<SourceConstant>(&source)) return c->value;
  if (const auto* poly = std::get_if<SourcePolynomial>(&source)) {
    double s = 0;
    for (const auto& t : poly->terms) {
      double m = t.c;
      for (int k = 0; k < t.ex; ++k) m *= pt.xy.x;
      for (int k = 0; k < t.ey; ++k) m *= pt.xy.y;
      s += m;
    }
    return s;
  }
  const auto& values = std::get<SourceNodal>(source).values;
  auto v = mesh.cell(cell);
  double s = 0;
  for (int k = 0; k <= mesh.dimension; ++k) s += values[v[k]] * pt.shape[k];
  return s;
}

}  // namespace

LoadVector assemble_source(const Mesh& mesh, const SourceTerm& source) {
  validate_source(mesh, source);
  LoadVector load;
  load.entries.assign(mesh.num_vertices(), 0.0);
  long double mass = 0;
  double linf = 0;
  std::vector<long double> acc(mesh.num_vertices(), 0.0L);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    for_each_cell_point(mesh, c, [&](const CellQuadPoint& pt) {
      const double f = eval_source_at(source, mesh, c, pt);
      linf = std::max(linf, std::fabs(f));
      mass += static_cast<long double>(f) * pt.weight;
      for (int k = 0; k <= mesh.dimension; ++k)
        acc[v[k]] += static_cast<long double>(f) * pt.shape[k] * pt.weight;
    });
  }
  for (int i = 0; i < mesh.num_vertices(); ++i)
    load.entries[i] = static_cast<double>(acc[i]);
  load.total_mass = static_cast<double>(mass);
  load.source_linf = linf;
  return load;
}

Regime classify_regime(const LoadVector& load, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classification tolerance must be positive");
  return std::fabs(load.total_mass) <= tol ? Regime::Compatible : Regime::Incompatible;
}

double default_compat_tol(const Mesh& mesh, const LoadVector& load) {
  const double scale = mesh.domain_measure() * load.source_linf;
  return std::max(1e-10 * scale, 1e-14);
}

}  // namespace robinpq
