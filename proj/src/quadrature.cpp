#include "robinpq/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace robinpq {

namespace {

// Gauss-Legendre on [0,1], mapped from the standard [-1,1] tables. The
// constants are written out explicitly so the committed rules are
// bit-reproducible.
constexpr double g5_nodes[5] = {
    0.046910077030668004, 0.230765344947158450, 0.500000000000000000,
    0.769234655052841550, 0.953089922969331996};
constexpr double g5_weights[5] = {
    0.118463442528094544, 0.239314335249683234, 0.284444444444444444,
    0.239314335249683234, 0.118463442528094544};

constexpr double g6_nodes[6] = {
    0.033765242898423986, 0.169395306766867743, 0.380690406958401546,
    0.619309593041598454, 0.830604693233132257, 0.966234757101576014};
constexpr double g6_weights[6] = {
    0.085662246189585172, 0.180380786524069304, 0.233956967286345524,
    0.233956967286345524, 0.180380786524069304, 0.085662246189585172};

}  // namespace

GaussRule01 gauss5_01() { return {g5_nodes, g5_weights, 5}; }
GaussRule01 gauss6_01() { return {g6_nodes, g6_weights, 6}; }

void for_each_cell_point(const Mesh& mesh, int c,
                         const std::function<void(const CellQuadPoint&)>& fn) {
  auto v = mesh.cell(c);
  const double measure = mesh.cell_measures[c];
  if (mesh.dimension == 1) {
    const Vec2& a = mesh.vertices[v[0]];
    const Vec2& b = mesh.vertices[v[1]];
    for (int k = 0; k < 5; ++k) {
      const double s = g5_nodes[k];
      CellQuadPoint pt;
      pt.xy = {a.x + (b.x - a.x) * s, 0.0};
      pt.weight = g5_weights[k] * measure;
      pt.shape = {1.0 - s, s, 0.0};
      fn(pt);
    }
    return;
  }
  // Duffy map of the tensor Gauss rule onto the reference triangle:
  // (xi, eta) -> (X, Y) = (xi, eta(1-xi)), Jacobian (1-xi).
  const Vec2& p0 = mesh.vertices[v[0]];
  const Vec2& p1 = mesh.vertices[v[1]];
  const Vec2& p2 = mesh.vertices[v[2]];
  for (int i = 0; i < 5; ++i) {
    const double xi = g5_nodes[i];
    for (int j = 0; j < 5; ++j) {
      const double eta = g5_nodes[j];
      const double X = xi;
      const double Y = eta * (1.0 - xi);
      CellQuadPoint pt;
      pt.shape = {1.0 - X - Y, X, Y};
      pt.xy = {p0.x * pt.shape[0] + p1.x * pt.shape[1] + p2.x * pt.shape[2],
               p0.y * pt.shape[0] + p1.y * pt.shape[1] + p2.y * pt.shape[2]};
      // reference-triangle weight sums to 1/2; physical factor is 2*area
      pt.weight = g5_weights[i] * g5_weights[j] * (1.0 - xi) * 2.0 * measure;
      fn(pt);
    }
  }
}

void for_each_facet_point(const Mesh& mesh, int f,
                          const std::function<void(const FacetQuadPoint&)>& fn) {
  auto fv = mesh.facet(f);
  if (mesh.dimension == 1) {
    FacetQuadPoint pt;
    pt.xy = mesh.vertices[fv[0]];
    pt.weight = mesh.facet_measures[f];  // counting measure
    pt.shape = {1.0, 0.0};
    fn(pt);
    return;
  }
  const Vec2& a = mesh.vertices[fv[0]];
  const Vec2& b = mesh.vertices[fv[1]];
  const double len = mesh.facet_measures[f];
  for (int k = 0; k < 6; ++k) {
    const double s = g6_nodes[k];
    FacetQuadPoint pt;
    pt.xy = {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s};
    pt.weight = g6_weights[k] * len;
    pt.shape = {1.0 - s, s};
    fn(pt);
  }
}

namespace {

struct AdaptiveState {
  const std::function<double(double)>& f;
  long evals = 0;
  int max_depth = 52;

  double eval(double x) {
    ++evals;
    return f(x);
  }

  // Adaptive Simpson with Richardson update.
  double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double recurse(double a, double fa, double m, double fm, double b, double fb,
                 double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = simpson(a, fa, flm, m, fm);
    const double right = simpson(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
      return left + right + delta / 15.0;
    return recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, long* evals) {
  if (a == b) return 0.0;
  AdaptiveState st{f};
  // Seed with a few panels so that symmetric integrands do not fool the
  // error estimate on the first split.
  const int panels = 8;
  long double total = 0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + k * h, x1 = a + (k + 1) * h, xm = 0.5 * (x0 + x1);
    const double f0 = st.eval(x0), f1 = st.eval(x1), fm = st.eval(xm);
    const double whole = st.simpson(x0, f0, fm, x1, f1);
    total += st.recurse(x0, f0, xm, fm, x1, f1, whole, abs_tol / panels,
                        st.max_depth);
  }
  if (evals) *evals += st.evals;
  return static_cast<double>(total);
}

}  // namespace robinpq
