#include "driftlab/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

namespace driftlab {

namespace {

std::uint64_t next_mesh_tag() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

double signed_volume(const Mesh& m, const std::array<int, 4>& cell) {
  const auto& v = m.vertices;
  if (m.dim == 2) {
    const Point &a = v[cell[0]], &b = v[cell[1]], &c = v[cell[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
  }
  const Point &a = v[cell[0]], &b = v[cell[1]], &c = v[cell[2]], &d = v[cell[3]];
  const double m00 = b[0] - a[0], m01 = b[1] - a[1], m02 = b[2] - a[2];
  const double m10 = c[0] - a[0], m11 = c[1] - a[1], m12 = c[2] - a[2];
  const double m20 = d[0] - a[0], m21 = d[1] - a[1], m22 = d[2] - a[2];
  const double det = m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
                     m02 * (m10 * m21 - m11 * m20);
  return det / 6.0;
}

}  // namespace

double Mesh::cell_volume(int c) const { return std::abs(signed_volume(*this, cells[c])); }

double Mesh::cell_diameter(int c) const {
  const int nv = verts_per_cell();
  double d2 = 0.0;
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j) {
      const Point &a = vertices[cells[c][i]], &b = vertices[cells[c][j]];
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      d2 = std::max(d2, s);
    }
  return std::sqrt(d2);
}

Point Mesh::cell_barycenter(int c) const {
  Point p{0.0, 0.0, 0.0};
  const int nv = verts_per_cell();
  for (int i = 0; i < nv; ++i)
    for (int k = 0; k < dim; ++k) p[k] += vertices[cells[c][i]][k] / nv;
  return p;
}

double Mesh::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= box.hi[k] - box.lo[k];
  return v;
}

Mesh build_box_mesh(int dim, std::array<int, 3> divisions, const Box& box) {
  if (dim != 2 && dim != 3) throw MeshError("build_box_mesh: dim must be 2 or 3");
  for (int k = 0; k < dim; ++k) {
    if (divisions[k] < 1) throw MeshError("build_box_mesh: divisions must be >= 1");
    if (!(box.hi[k] > box.lo[k])) throw MeshError("build_box_mesh: zero-width box");
  }
  Mesh m;
  m.dim = dim;
  m.box = box;
  m.divisions = divisions;
  if (dim == 2) m.divisions[2] = 0;

  const int nx = divisions[0], ny = divisions[1], nz = (dim == 3) ? divisions[2] : 0;
  const int vx = nx + 1, vy = ny + 1, vz = (dim == 3) ? nz + 1 : 1;

  // Vertices, lexicographic by grid index (x fastest).
  m.vertices.reserve(static_cast<std::size_t>(vx) * vy * vz);
  for (int k = 0; k < vz; ++k)
    for (int j = 0; j < vy; ++j)
      for (int i = 0; i < vx; ++i) {
        Point p{box.lo[0] + (box.hi[0] - box.lo[0]) * i / nx,
                box.lo[1] + (box.hi[1] - box.lo[1]) * j / ny, 0.0};
        if (dim == 3) p[2] = box.lo[2] + (box.hi[2] - box.lo[2]) * k / nz;
        m.vertices.push_back(p);
      }
  auto vid = [&](int i, int j, int k) { return (k * vy + j) * vx + i; };

  // Kuhn triangulation: dim! simplices per grid cell.
  if (dim == 2) {
    m.cells.reserve(static_cast<std::size_t>(nx) * ny * 2);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int v00 = vid(i, j, 0), v10 = vid(i + 1, j, 0);
        const int v01 = vid(i, j + 1, 0), v11 = vid(i + 1, j + 1, 0);
        m.cells.push_back({v00, v10, v11, -1});
        m.cells.push_back({v00, v11, v01, -1});
      }
  } else {
    // For each permutation pi of axes, the path corner -> corner + e_{pi0}
    // -> ... -> opposite corner spans one tetrahedron.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    m.cells.reserve(static_cast<std::size_t>(nx) * ny * nz * 6);
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> g{i, j, k};
            std::array<int, 4> cell;
            cell[0] = vid(g[0], g[1], g[2]);
            for (int s = 0; s < 3; ++s) {
              g[p[s]] += 1;
              cell[s + 1] = vid(g[0], g[1], g[2]);
            }
            m.cells.push_back(cell);
          }
  }

  // Consistent positive orientation.
  for (auto& cell : m.cells)
    if (signed_volume(m, cell) < 0.0) std::swap(cell[dim - 1], cell[dim]);

  // Boundary = vertices with some coordinate on a box face.
  m.on_boundary.assign(m.vertices.size(), 0);
  m.interior_index.assign(m.vertices.size(), -1);
  for (int v = 0; v < m.n_vertices(); ++v) {
    const auto& p = m.vertices[v];
    bool bdry = false;
    for (int d = 0; d < dim; ++d)
      if (p[d] == box.lo[d] || p[d] == box.hi[d]) bdry = true;
    m.on_boundary[v] = bdry ? 1 : 0;
    if (bdry)
      m.boundary_nodes.push_back(v);
    else {
      m.interior_index[v] = static_cast<int>(m.interior_nodes.size());
      m.interior_nodes.push_back(v);
    }
  }

  m.h = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) m.h = std::max(m.h, m.cell_diameter(c));
  m.tag = next_mesh_tag();
  return m;
}

Mesh refine(const Mesh& mesh) {
  std::array<int, 3> div = mesh.divisions;
  for (int k = 0; k < mesh.dim; ++k) div[k] *= 2;
  return build_box_mesh(mesh.dim, div, mesh.box);
}

void dump_mesh(const Mesh& mesh, std::ostream& out) {
  out << mesh.dim << ' ' << mesh.n_vertices() << ' ' << mesh.n_cells() << '\n';
  for (const auto& p : mesh.vertices) {
    out << p[0] << ' ' << p[1];
    if (mesh.dim == 3) out << ' ' << p[2];
    out << '\n';
  }
  for (const auto& c : mesh.cells) {
    out << c[0] << ' ' << c[1] << ' ' << c[2];
    if (mesh.dim == 3) out << ' ' << c[3];
    out << '\n';
  }
}

}  // namespace driftlab
