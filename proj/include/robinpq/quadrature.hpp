#pragma once

#include <array>
#include <functional>

#include "robinpq/mesh.hpp"

namespace robinpq {

// Gauss-Legendre nodes/weights on [0,1].
struct GaussRule01 {
  const double* nodes;
  const double* weights;
  int size;
};

GaussRule01 gauss5_01();
GaussRule01 gauss6_01();

// One quadrature point of a cell rule: physical weight (includes the cell
// measure) and P1 shape values at the point.
struct CellQuadPoint {
  Vec2 xy;
  double weight;
  std::array<double, 3> shape;  // shape[2] unused in 1D
};

/// Visit the fixed volume rule on one cell: 5-point Gauss in 1D, a 5x5
/// Duffy tensor rule on triangles (exact for total degree <= 7).
void for_each_cell_point(const Mesh& mesh, int c,
                         const std::function<void(const CellQuadPoint&)>& fn);

struct FacetQuadPoint {
  Vec2 xy;
  double weight;
  std::array<double, 2> shape;
};

/// Visit the committed boundary rule on one facet: point evaluation in 1D
/// (counting measure), 6-point Gauss per edge in 2D.
void for_each_facet_point(const Mesh& mesh, int f,
                          const std::function<void(const FacetQuadPoint&)>& fn);

/// Adaptive quadrature of a 1D integrand to an absolute tolerance; counts
/// evaluations in `evals` when non-null. Used by the closed-form/quadrature
/// oracles, not by the FEM path.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, long* evals = nullptr);

}  // namespace robinpq
