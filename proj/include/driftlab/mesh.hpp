#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace driftlab {

using Point = std::array<double, 3>;

struct Box {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
};

/// Conforming simplicial mesh of an axis-aligned box, Kuhn-triangulated.
/// Immutable after construction; vertex order is lexicographic by grid index.
struct Mesh {
  int dim = 0;
  Box box;
  std::array<int, 3> divisions{0, 0, 0};
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> cells;  // dim+1 entries used per cell
  std::vector<char> on_boundary;          // per vertex
  std::vector<int> boundary_nodes;        // sorted vertex indices
  std::vector<int> interior_index;        // vertex -> interior index, or -1
  std::vector<int> interior_nodes;        // interior index -> vertex
  double h = 0.0;                         // max cell diameter
  std::uint64_t tag = 0;                  // identity of the construction

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_interior() const { return static_cast<int>(interior_nodes.size()); }
  int verts_per_cell() const { return dim + 1; }

  double cell_volume(int c) const;
  double cell_diameter(int c) const;
  Point cell_barycenter(int c) const;
  double volume() const;  // |Omega|
};

Mesh build_box_mesh(int dim, std::array<int, 3> divisions, const Box& box);
Mesh refine(const Mesh& mesh);

/// Plain-text dump: header line `dim nv nc`, vertex coordinate lines,
/// then 0-based cell index lines.
void dump_mesh(const Mesh& mesh, std::ostream& out);

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace driftlab
