#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace robinpq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class MeshFamily { Interval, Rectangle, Imported };

// How a mesh was generated; lets callers rebuild coarse/fine companions of
// the same family (Richardson error floors, refinement studies).
struct MeshProvenance {
  MeshFamily family = MeshFamily::Imported;
  double a = 0.0, b = 0.0;    // interval
  double lx = 0.0, ly = 0.0;  // rectangle
  int n = 0, nx = 0, ny = 0;
};

/// Simplicial mesh of a 1D interval or a 2D polygonal domain, with explicit
/// boundary structure. Immutable after construction; safe for shared reads.
class Mesh {
 public:
  int dimension = 1;  // 1 or 2
  std::vector<Vec2> vertices;
  std::vector<int> cells;            // stride dimension+1
  std::vector<int> boundary_facets;  // stride dimension
  std::vector<int> facet_cell;       // owning cell per boundary facet
  std::vector<double> facet_orientation;  // 1D: outward normal (+-1); 2D: +1 (edges stored with domain on the left)
  std::vector<double> cell_measures;
  std::vector<double> facet_measures;  // 1D: counting measure 1 per endpoint
  MeshProvenance provenance;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cell_measures.size()); }
  int num_facets() const { return static_cast<int>(facet_measures.size()); }

  std::span<const int> cell(int c) const {
    return {cells.data() + static_cast<size_t>(c) * (dimension + 1),
            static_cast<size_t>(dimension + 1)};
  }
  std::span<const int> facet(int f) const {
    return {boundary_facets.data() + static_cast<size_t>(f) * dimension,
            static_cast<size_t>(dimension)};
  }

  double domain_measure() const;    // sum of cell measures
  double boundary_measure() const;  // sum of facet measures
  double max_cell_diameter() const;

  /// Sorted unique vertex indices lying on the boundary.
  std::vector<int> boundary_vertices() const;
  std::vector<char> boundary_vertex_mask() const;

  // Cellwise constant gradients of the P1 hat functions, precomputed at
  // construction: entry [c*(d+1)+i] is grad(phi_i) on cell c.
  std::vector<Vec2> cell_shape_gradients;

  /// Recompute measures, shape gradients and facet adjacency from the raw
  /// vertex/cell/boundary arrays. Throws MeshError on degenerate cells or an
  /// inconsistent boundary list.
  void finalize();
};

Mesh build_interval_mesh(double a, double b, int n);
Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny);

Mesh import_mesh(const std::string& path);
Mesh read_mesh(std::istream& in, const std::string& origin = "<stream>");
void write_mesh(const Mesh& mesh, std::ostream& out);
void export_mesh(const Mesh& mesh, const std::string& path);

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr share(Mesh&& m) { return std::make_shared<const Mesh>(std::move(m)); }

}  // namespace robinpq
