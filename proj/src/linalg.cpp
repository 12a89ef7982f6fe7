#include "robinpq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "robinpq/errors.hpp"
#include "robinpq/quadrature.hpp"

namespace robinpq {

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<int>& ti, std::vector<int>& tj,
                                   std::vector<double>& tv) {
  std::vector<size_t> order(ti.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (ti[a] != ti[b]) return ti[a] < ti[b];
    return tj[a] < tj[b];
  });
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  int prev_i = -1, prev_j = -1;
  for (size_t k : order) {
    const int i = ti[k], j = tj[k];
    if (i == prev_i && j == prev_j) {
      m.vals.back() += tv[k];
    } else {
      m.cols.push_back(j);
      m.vals.push_back(tv[k]);
      m.row_ptr[i + 1] += 1;
      prev_i = i;
      prev_j = j;
    }
  }
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    long double s = 0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      s += static_cast<long double>(vals[k]) * x[cols[k]];
    y[i] = static_cast<double>(s);
  }
  return y;
}

CsrMatrix assemble_stiffness(const Mesh& mesh) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  const int nn = mesh.dimension + 1;
  ti.reserve(static_cast<size_t>(mesh.num_cells()) * nn * nn);
  tj.reserve(ti.capacity());
  tv.reserve(ti.capacity());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    const double A = mesh.cell_measures[c];
    for (int a = 0; a < nn; ++a) {
      const Vec2& ga = mesh.cell_shape_gradients[c * nn + a];
      for (int b = 0; b < nn; ++b) {
        const Vec2& gb = mesh.cell_shape_gradients[c * nn + b];
        ti.push_back(v[a]);
        tj.push_back(v[b]);
        tv.push_back(A * (ga.x * gb.x + ga.y * gb.y));
      }
    }
  }
  return CsrMatrix::from_triplets(mesh.num_vertices(), ti, tj, tv);
}

CsrMatrix assemble_boundary_mass(const Mesh& mesh) {
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto fv = mesh.facet(f);
    if (mesh.dimension == 1) {
      ti.push_back(fv[0]);
      tj.push_back(fv[0]);
      tv.push_back(mesh.facet_measures[f]);
    } else {
      const double len = mesh.facet_measures[f];
      const double d = len / 3.0, o = len / 6.0;
      const int i = fv[0], j = fv[1];
      ti.insert(ti.end(), {i, i, j, j});
      tj.insert(tj.end(), {i, j, i, j});
      tv.insert(tv.end(), {d, o, o, d});
    }
  }
  return CsrMatrix::from_triplets(mesh.num_vertices(), ti, tj, tv);
}

CsrMatrix add_scaled(const CsrMatrix& a, const CsrMatrix& b, double scale) {
  if (a.n != b.n) throw std::invalid_argument("matrix dimension mismatch");
  std::vector<int> ti, tj;
  std::vector<double> tv;
  ti.reserve(a.vals.size() + b.vals.size());
  tj.reserve(ti.capacity());
  tv.reserve(ti.capacity());
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      ti.push_back(i);
      tj.push_back(a.cols[k]);
      tv.push_back(a.vals[k]);
    }
  for (int i = 0; i < b.n; ++i)
    for (int k = b.row_ptr[i]; k < b.row_ptr[i + 1]; ++k) {
      ti.push_back(i);
      tj.push_back(b.cols[k]);
      tv.push_back(scale * b.vals[k]);
    }
  return CsrMatrix::from_triplets(a.n, ti, tj, tv);
}

std::vector<double> lumped_boundary_weights(const Mesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto fv = mesh.facet(f);
    if (mesh.dimension == 1) {
      w[fv[0]] += mesh.facet_measures[f];
    } else {
      w[fv[0]] += 0.5 * mesh.facet_measures[f];
      w[fv[1]] += 0.5 * mesh.facet_measures[f];
    }
  }
  return w;
}

std::vector<double> lumped_volume_weights(const Mesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  const int nn = mesh.dimension + 1;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    for (int k = 0; k < nn; ++k) w[v[k]] += mesh.cell_measures[c] / nn;
  }
  return w;
}

ReducedSystem restrict_system(const CsrMatrix& a, const std::vector<char>& keep) {
  ReducedSystem rs;
  rs.reduced_of_full.assign(a.n, -1);
  for (int i = 0; i < a.n; ++i)
    if (keep[i]) {
      rs.reduced_of_full[i] = static_cast<int>(rs.full_of_reduced.size());
      rs.full_of_reduced.push_back(i);
    }
  const int m = static_cast<int>(rs.full_of_reduced.size());
  std::vector<int> ti, tj;
  std::vector<double> tv;
  for (int i = 0; i < a.n; ++i) {
    if (!keep[i]) continue;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.cols[k];
      if (!keep[j]) continue;
      ti.push_back(rs.reduced_of_full[i]);
      tj.push_back(rs.reduced_of_full[j]);
      tv.push_back(a.vals[k]);
    }
  }
  rs.matrix = CsrMatrix::from_triplets(m, ti, tj, tv);
  return rs;
}

BandedCholesky::BandedCholesky(const CsrMatrix& a) : n_(a.n) {
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      hbw_ = std::max(hbw_, std::abs(i - a.cols[k]));
  const int w = hbw_ + 1;
  band_.assign(static_cast<size_t>(n_) * w, 0.0);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int j = a.cols[k];
      if (j <= i) band_[static_cast<size_t>(j) * w + (i - j)] = a.vals[k];
    }
  // In-place banded LL^T.
  for (int j = 0; j < n_; ++j) {
    double d = band_[static_cast<size_t>(j) * w];
    const int kmin = std::max(0, j - hbw_);
    for (int k = kmin; k < j; ++k) {
      const double l = band_[static_cast<size_t>(k) * w + (j - k)];
      d -= l * l;
    }
    if (!(d > 0.0)) throw SolverError("matrix is not positive definite (pivot " + std::to_string(j) + ")");
    const double dj = std::sqrt(d);
    band_[static_cast<size_t>(j) * w] = dj;
    const int imax = std::min(n_ - 1, j + hbw_);
    for (int i = j + 1; i <= imax; ++i) {
      double s = band_[static_cast<size_t>(j) * w + (i - j)];
      const int k0 = std::max({0, i - hbw_, j - hbw_});
      for (int k = k0; k < j; ++k)
        s -= band_[static_cast<size_t>(k) * w + (i - k)] * band_[static_cast<size_t>(k) * w + (j - k)];
      band_[static_cast<size_t>(j) * w + (i - j)] = s / dj;
    }
  }
}

void BandedCholesky::solve_in_place(std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("rhs size mismatch");
  const int w = hbw_ + 1;
  // forward: L y = b
  for (int j = 0; j < n_; ++j) {
    x[j] /= band_[static_cast<size_t>(j) * w];
    const int imax = std::min(n_ - 1, j + hbw_);
    for (int i = j + 1; i <= imax; ++i)
      x[i] -= band_[static_cast<size_t>(j) * w + (i - j)] * x[j];
  }
  // backward: L^T x = y
  for (int j = n_ - 1; j >= 0; --j) {
    const int imax = std::min(n_ - 1, j + hbw_);
    double s = x[j];
    for (int i = j + 1; i <= imax; ++i)
      s -= band_[static_cast<size_t>(j) * w + (i - j)] * x[i];
    x[j] = s / band_[static_cast<size_t>(j) * w];
  }
}

std::vector<double> BandedCholesky::solve(const std::vector<double>& rhs) const {
  std::vector<double> x = rhs;
  solve_in_place(x);
  return x;
}

}  // namespace robinpq
