#pragma once

#include <array>
#include <functional>

#include "driftlab/mesh.hpp"

namespace driftlab {

/// Resolution hint for integrands with fine-scale structure. Cells are
/// recursively subdivided until sub-simplex diameters reach length_scale;
/// sub-simplices outside the support box are not refined further.
struct QuadHint {
  double length_scale = 0.0;  // 0 => base rule only
  bool has_support = false;
  std::array<double, 3> support_lo{0.0, 0.0, 0.0};
  std::array<double, 3> support_hi{0.0, 0.0, 0.0};
};

using QuadCallback = std::function<void(const Point& x, double weight)>;

/// Composite quadrature over one cell, exact for polynomials of degree 4
/// per (sub-)simplex. Weights are positive and sum to the cell volume.
void cell_quadrature(const Mesh& mesh, int cell, const QuadHint* hint,
                     const QuadCallback& cb);

/// Integral of f over the whole mesh with per-cell quadrature.
double integrate(const Mesh& mesh, const std::function<double(const Point&, int cell)>& f,
                 const QuadHint* hint = nullptr);

}  // namespace driftlab
