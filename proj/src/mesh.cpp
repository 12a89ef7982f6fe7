#include "robinpq/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "robinpq/errors.hpp"

namespace robinpq {

double Mesh::domain_measure() const {
  long double s = 0;
  for (double m : cell_measures) s += m;
  return static_cast<double>(s);
}

double Mesh::boundary_measure() const {
  long double s = 0;
  for (double m : facet_measures) s += m;
  return static_cast<double>(s);
}

double Mesh::max_cell_diameter() const {
  double h = 0;
  for (int c = 0; c < num_cells(); ++c) {
    auto v = cell(c);
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j) {
        const Vec2& p = vertices[v[i]];
        const Vec2& r = vertices[v[j]];
        h = std::max(h, std::hypot(p.x - r.x, p.y - r.y));
      }
  }
  return h;
}

std::vector<char> Mesh::boundary_vertex_mask() const {
  std::vector<char> mask(vertices.size(), 0);
  for (int idx : boundary_facets) mask[idx] = 1;
  return mask;
}

std::vector<int> Mesh::boundary_vertices() const {
  auto mask = boundary_vertex_mask();
  std::vector<int> out;
  for (int i = 0; i < num_vertices(); ++i)
    if (mask[i]) out.push_back(i);
  return out;
}

namespace {

double signed_cell_measure(const Mesh& m, int c) {
  auto v = m.cell(c);
  if (m.dimension == 1) {
    return m.vertices[v[1]].x - m.vertices[v[0]].x;
  }
  const Vec2& a = m.vertices[v[0]];
  const Vec2& b = m.vertices[v[1]];
  const Vec2& d = m.vertices[v[2]];
  return 0.5 * ((b.x - a.x) * (d.y - a.y) - (d.x - a.x) * (b.y - a.y));
}

// Key for a cell face: sorted vertex indices.
std::pair<int, int> face_key(std::span<const int> f) {
  if (f.size() == 1) return {f[0], -1};
  return {std::min(f[0], f[1]), std::max(f[0], f[1])};
}

}  // namespace

void Mesh::finalize() {
  if (dimension != 1 && dimension != 2)
    throw MeshError("mesh dimension must be 1 or 2");
  const int nv = num_vertices();
  const int stride = dimension + 1;
  if (cells.size() % stride != 0)
    throw MeshError("cell list length is not a multiple of dimension+1");
  if (boundary_facets.size() % dimension != 0)
    throw MeshError("boundary list length is not a multiple of dimension");
  for (int idx : cells)
    if (idx < 0 || idx >= nv) throw MeshError("cell vertex index out of range");
  for (int idx : boundary_facets)
    if (idx < 0 || idx >= nv) throw MeshError("boundary vertex index out of range");

  const int nc = static_cast<int>(cells.size()) / stride;
  cell_measures.assign(nc, 0.0);
  cell_shape_gradients.assign(static_cast<size_t>(nc) * stride, Vec2{});
  for (int c = 0; c < nc; ++c) {
    const double sm = signed_cell_measure(*this, c);
    if (!(sm > 0.0))
      throw MeshError("inverted or degenerate cell " + std::to_string(c) +
                      " (nonpositive measure)");
    cell_measures[c] = sm;
    auto v = cell(c);
    if (dimension == 1) {
      const double h = sm;
      cell_shape_gradients[c * 2 + 0] = {-1.0 / h, 0.0};
      cell_shape_gradients[c * 2 + 1] = {1.0 / h, 0.0};
    } else {
      // grad(phi_i) = rotated opposite edge / (2 area)
      const Vec2& a = vertices[v[0]];
      const Vec2& b = vertices[v[1]];
      const Vec2& d = vertices[v[2]];
      const double inv2A = 1.0 / (2.0 * sm);
      cell_shape_gradients[c * 3 + 0] = {(b.y - d.y) * inv2A, (d.x - b.x) * inv2A};
      cell_shape_gradients[c * 3 + 1] = {(d.y - a.y) * inv2A, (a.x - d.x) * inv2A};
      cell_shape_gradients[c * 3 + 2] = {(a.y - b.y) * inv2A, (b.x - a.x) * inv2A};
    }
  }

  // Faces seen exactly once among cells must coincide with the boundary list.
  std::map<std::pair<int, int>, std::pair<int, int>> face_count;  // key -> (count, cell)
  for (int c = 0; c < nc; ++c) {
    auto v = cell(c);
    if (dimension == 1) {
      for (int i = 0; i < 2; ++i) {
        int f[1] = {v[i]};
        auto& e = face_count[face_key(std::span<const int>(f, 1))];
        e.first += 1;
        e.second = c;
      }
    } else {
      for (int i = 0; i < 3; ++i) {
        int f[2] = {v[i], v[(i + 1) % 3]};
        auto& e = face_count[face_key(std::span<const int>(f, 2))];
        e.first += 1;
        e.second = c;
      }
    }
  }

  const int nf = static_cast<int>(boundary_facets.size()) / dimension;
  facet_measures.assign(nf, 0.0);
  facet_cell.assign(nf, -1);
  facet_orientation.assign(nf, 1.0);
  std::map<std::pair<int, int>, int> listed;
  for (int f = 0; f < nf; ++f) {
    auto fv = facet(f);
    auto key = face_key(fv);
    if (listed.count(key))
      throw MeshError("boundary facet listed twice");
    listed[key] = f;
    auto it = face_count.find(key);
    if (it == face_count.end())
      throw MeshError("boundary facet not on any cell");
    if (it->second.first != 1)
      throw MeshError("boundary facet shared by " +
                      std::to_string(it->second.first) + " cells");
    facet_cell[f] = it->second.second;
    if (dimension == 1) {
      facet_measures[f] = 1.0;  // counting measure per endpoint
      auto cv = cell(facet_cell[f]);
      facet_orientation[f] = (fv[0] == cv[0]) ? -1.0 : 1.0;
    } else {
      const Vec2& a = vertices[fv[0]];
      const Vec2& b = vertices[fv[1]];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (!(len > 0.0)) throw MeshError("zero-length boundary edge");
      facet_measures[f] = len;
    }
  }
  for (const auto& [key, e] : face_count) {
    if (e.first == 1 && !listed.count(key))
      throw MeshError("boundary list omits an exterior face");
  }
}

Mesh build_interval_mesh(double a, double b, int n) {
  if (!(a < b)) throw MeshError("interval requires a < b");
  if (n < 1) throw MeshError("interval requires at least one cell");
  Mesh m;
  m.dimension = 1;
  m.vertices.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    m.vertices[i] = {a + (b - a) * (static_cast<double>(i) / n), 0.0};
  m.vertices[n].x = b;
  m.cells.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    m.cells.push_back(i);
    m.cells.push_back(i + 1);
  }
  m.boundary_facets = {0, n};
  m.provenance = {MeshFamily::Interval, a, b, 0, 0, n, 0, 0};
  m.finalize();
  return m;
}

Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw MeshError("rectangle requires positive side lengths");
  if (nx < 1 || ny < 1) throw MeshError("rectangle requires at least one cell per side");
  Mesh m;
  m.dimension = 2;
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.vertices.resize(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices[id(i, j)] = {lx * (static_cast<double>(i) / nx),
                              ly * (static_cast<double>(j) / ny)};
  // Fixed lower-left to upper-right diagonal in every grid square.
  m.cells.reserve(static_cast<size_t>(nx) * ny * 6);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.cells.insert(m.cells.end(), {a, b, c});
      m.cells.insert(m.cells.end(), {a, c, d});
    }
  // Perimeter edges, counterclockwise (domain on the left of each edge).
  for (int i = 0; i < nx; ++i) m.boundary_facets.insert(m.boundary_facets.end(), {id(i, 0), id(i + 1, 0)});
  for (int j = 0; j < ny; ++j) m.boundary_facets.insert(m.boundary_facets.end(), {id(nx, j), id(nx, j + 1)});
  for (int i = nx; i > 0; --i) m.boundary_facets.insert(m.boundary_facets.end(), {id(i, ny), id(i - 1, ny)});
  for (int j = ny; j > 0; --j) m.boundary_facets.insert(m.boundary_facets.end(), {id(0, j), id(0, j - 1)});
  m.provenance = {MeshFamily::Rectangle, 0, 0, lx, ly, 0, nx, ny};
  m.finalize();
  return m;
}

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "dim " << mesh.dimension << "\n";
  out << "vertices " << mesh.num_vertices() << "\n";
  for (const Vec2& v : mesh.vertices) {
    out << fmt_full(v.x);
    if (mesh.dimension == 2) out << " " << fmt_full(v.y);
    out << "\n";
  }
  const int stride = mesh.dimension + 1;
  out << "cells " << mesh.num_cells() << "\n";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto v = mesh.cell(c);
    for (int k = 0; k < stride; ++k) out << (k ? " " : "") << v[k];
    out << "\n";
  }
  out << "boundary " << mesh.num_facets() << "\n";
  for (int f = 0; f < mesh.num_facets(); ++f) {
    auto v = mesh.facet(f);
    for (int k = 0; k < mesh.dimension; ++k) out << (k ? " " : "") << v[k];
    out << "\n";
  }
}

void export_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
}

namespace {

struct LineReader {
  std::istream& in;
  std::string origin;
  int lineno = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError(origin + ":" + std::to_string(lineno) + ": " + msg);
  }
};

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& origin) {
  LineReader rd{in, origin};
  std::string line, word;
  Mesh m;

  auto expect_header = [&](const char* name) -> long {
    if (!rd.next(line)) rd.fail(std::string("expected '") + name + " <count>'");
    std::istringstream ss(line);
    long count = -1;
    if (!(ss >> word >> count) || word != name || count < 0)
      rd.fail(std::string("expected '") + name + " <count>', got '" + line + "'");
    return count;
  };

  if (!rd.next(line)) rd.fail("empty mesh file");
  {
    std::istringstream ss(line);
    int d = 0;
    if (!(ss >> word >> d) || word != "dim" || (d != 1 && d != 2))
      rd.fail("expected 'dim 1' or 'dim 2'");
    m.dimension = d;
  }

  const long nv = expect_header("vertices");
  m.vertices.resize(nv);
  for (long i = 0; i < nv; ++i) {
    if (!rd.next(line)) rd.fail("unexpected end of vertex list");
    std::istringstream ss(line);
    Vec2 v;
    if (!(ss >> v.x) || (m.dimension == 2 && !(ss >> v.y)))
      rd.fail("malformed vertex coordinates");
    m.vertices[i] = v;
  }

  const long nc = expect_header("cells");
  const int stride = m.dimension + 1;
  m.cells.resize(nc * stride);
  for (long c = 0; c < nc; ++c) {
    if (!rd.next(line)) rd.fail("unexpected end of cell list");
    std::istringstream ss(line);
    for (int k = 0; k < stride; ++k)
      if (!(ss >> m.cells[c * stride + k])) rd.fail("malformed cell indices");
  }

  const long nf = expect_header("boundary");
  m.boundary_facets.resize(nf * m.dimension);
  for (long f = 0; f < nf; ++f) {
    if (!rd.next(line)) rd.fail("unexpected end of boundary list");
    std::istringstream ss(line);
    for (int k = 0; k < m.dimension; ++k)
      if (!(ss >> m.boundary_facets[f * m.dimension + k]))
        rd.fail("malformed boundary facet indices");
  }

  m.provenance.family = MeshFamily::Imported;
  m.finalize();
  return m;
}

Mesh import_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(in, path);
}

}  // namespace robinpq
