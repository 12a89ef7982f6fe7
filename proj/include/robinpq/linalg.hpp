#pragma once

#include <vector>

#include "robinpq/mesh.hpp"

namespace robinpq {

/// Compressed sparse row matrix (square, symmetric usage).
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> cols;
  std::vector<double> vals;

  static CsrMatrix from_triplets(int n, std::vector<int>& ti, std::vector<int>& tj,
                                 std::vector<double>& tv);
  std::vector<double> multiply(const std::vector<double>& x) const;
};

/// P1 stiffness matrix: K_ij = \int grad phi_i . grad phi_j.
CsrMatrix assemble_stiffness(const Mesh& mesh);

/// Consistent boundary mass matrix: B_ij = \int_bnd phi_i phi_j
/// (identity on boundary vertices in 1D, edge mass in 2D).
CsrMatrix assemble_boundary_mass(const Mesh& mesh);

/// a + scale * b (same dimension, patterns merged).
CsrMatrix add_scaled(const CsrMatrix& a, const CsrMatrix& b, double scale);

/// Row sums of the boundary mass: w_i = \int_bnd phi_i ds (zero off-boundary).
std::vector<double> lumped_boundary_weights(const Mesh& mesh);

/// w_i = \int phi_i dx.
std::vector<double> lumped_volume_weights(const Mesh& mesh);

/// Keeps rows/cols with keep[i] != 0; full_of_reduced maps back.
struct ReducedSystem {
  CsrMatrix matrix;
  std::vector<int> full_of_reduced;
  std::vector<int> reduced_of_full;  // -1 for dropped dofs
};
ReducedSystem restrict_system(const CsrMatrix& a, const std::vector<char>& keep);

/// Banded Cholesky (LL^T) factorization for SPD matrices. The half
/// bandwidth is taken from the sparsity pattern; generated meshes give a
/// tight band (1 in 1D, about nx in 2D).
class BandedCholesky {
 public:
  explicit BandedCholesky(const CsrMatrix& a);
  void solve_in_place(std::vector<double>& x) const;
  std::vector<double> solve(const std::vector<double>& rhs) const;
  int half_bandwidth() const { return hbw_; }

 private:
  int n_ = 0;
  int hbw_ = 0;
  std::vector<double> band_;  // band_[j*(hbw+1)+k] = L(j+k, j)
};

}  // namespace robinpq
