#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "robinpq/mesh.hpp"

namespace robinpq {

struct SourceConstant {
  double value = 0.0;
};

// c * x^ex * y^ey with per-coordinate degree at most 3 (ey = 0 in 1D).
struct SourceMonomial {
  int ex = 0;
  int ey = 0;
  double c = 0.0;
};

struct SourcePolynomial {
  std::vector<SourceMonomial> terms;
};

struct SourceNodal {
  std::vector<double> values;  // one per mesh vertex
};

using SourceTerm = std::variant<SourceConstant, SourcePolynomial, SourceNodal>;

/// Throws std::invalid_argument when the source is malformed for the mesh
/// (nodal length mismatch, monomial degree above 3).
void validate_source(const Mesh& mesh, const SourceTerm& source);

std::string describe_source(const SourceTerm& source);

/// The tuple (domain, p, q, alpha, f) defining one problem instance.
struct ProblemSpec {
  MeshPtr mesh;
  double p = 2.0;
  double q = 2.0;
  double alpha = 1.0;
  SourceTerm source = SourceConstant{0.0};

  void validate() const;  // p > 1, q > 1, alpha >= 0, source consistent
  std::string fingerprint() const;
};

/// Nodal load F_i = integral of f * phi_i, plus the total mass integral of f.
struct LoadVector {
  std::vector<double> entries;
  double total_mass = 0.0;
  double source_linf = 0.0;  // max |f| over the assembly quadrature points
};

LoadVector assemble_source(const Mesh& mesh, const SourceTerm& source);

enum class Regime { Compatible, Incompatible };

/// Compatible iff |total mass| <= tol.
Regime classify_regime(const LoadVector& load, double tol);

/// Default classification tolerance: 1e-10 * |domain| * max|f| (quadrature
/// round-off scale), floored at 1e-14 for the all-zero source.
double default_compat_tol(const Mesh& mesh, const LoadVector& load);

}  // namespace robinpq
