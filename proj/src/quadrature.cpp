#include "driftlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace driftlab {

namespace {

struct RulePoint {
  std::array<double, 4> bary;
  double weight;  // relative to simplex volume
};

// Dunavant 6-point rule, exact for degree 4 on triangles.
const RulePoint kTriRule[] = {
    {{0.108103018168070, 0.445948490915965, 0.445948490915965, 0.0}, 0.223381589678011},
    {{0.445948490915965, 0.108103018168070, 0.445948490915965, 0.0}, 0.223381589678011},
    {{0.445948490915965, 0.445948490915965, 0.108103018168070, 0.0}, 0.223381589678011},
    {{0.816847572980459, 0.091576213509771, 0.091576213509771, 0.0}, 0.109951743655322},
    {{0.091576213509771, 0.816847572980459, 0.091576213509771, 0.0}, 0.109951743655322},
    {{0.091576213509771, 0.091576213509771, 0.816847572980459, 0.0}, 0.109951743655322},
};

// 14-point rule, exact for degree 5 on tetrahedra (all weights positive).
constexpr double kTetA1 = 0.3108859192633006, kTetB1 = 0.0673422422100983;
constexpr double kTetA2 = 0.0927352503108912, kTetB2 = 0.7217942490673264;
constexpr double kTetC1 = 0.0455037041256497, kTetC2 = 0.4544962958743503;
constexpr double kTetW1 = 0.1126879257180159, kTetW2 = 0.0734930431163620;
constexpr double kTetW3 = 0.0425460207770815;
const RulePoint kTetRule[] = {
    {{kTetB1, kTetA1, kTetA1, kTetA1}, kTetW1},
    {{kTetA1, kTetB1, kTetA1, kTetA1}, kTetW1},
    {{kTetA1, kTetA1, kTetB1, kTetA1}, kTetW1},
    {{kTetA1, kTetA1, kTetA1, kTetB1}, kTetW1},
    {{kTetB2, kTetA2, kTetA2, kTetA2}, kTetW2},
    {{kTetA2, kTetB2, kTetA2, kTetA2}, kTetW2},
    {{kTetA2, kTetA2, kTetB2, kTetA2}, kTetW2},
    {{kTetA2, kTetA2, kTetA2, kTetB2}, kTetW2},
    {{kTetC1, kTetC1, kTetC2, kTetC2}, kTetW3},
    {{kTetC1, kTetC2, kTetC1, kTetC2}, kTetW3},
    {{kTetC1, kTetC2, kTetC2, kTetC1}, kTetW3},
    {{kTetC2, kTetC1, kTetC1, kTetC2}, kTetW3},
    {{kTetC2, kTetC1, kTetC2, kTetC1}, kTetW3},
    {{kTetC2, kTetC2, kTetC1, kTetC1}, kTetW3},
};

struct Simplex {
  std::array<Point, 4> v;
  int dim;

  double volume() const {
    if (dim == 2) {
      return 0.5 * std::abs((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                            (v[1][1] - v[0][1]) * (v[2][0] - v[0][0]));
    }
    const double m00 = v[1][0] - v[0][0], m01 = v[1][1] - v[0][1], m02 = v[1][2] - v[0][2];
    const double m10 = v[2][0] - v[0][0], m11 = v[2][1] - v[0][1], m12 = v[2][2] - v[0][2];
    const double m20 = v[3][0] - v[0][0], m21 = v[3][1] - v[0][1], m22 = v[3][2] - v[0][2];
    return std::abs(m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
                    m02 * (m10 * m21 - m11 * m20)) / 6.0;
  }

  double diameter() const {
    double d2 = 0.0;
    for (int i = 0; i <= dim; ++i)
      for (int j = i + 1; j <= dim; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += (v[i][k] - v[j][k]) * (v[i][k] - v[j][k]);
        d2 = std::max(d2, s);
      }
    return std::sqrt(d2);
  }

  bool intersects_box(const std::array<double, 3>& lo, const std::array<double, 3>& hi) const {
    for (int k = 0; k < dim; ++k) {
      double mn = v[0][k], mx = v[0][k];
      for (int i = 1; i <= dim; ++i) {
        mn = std::min(mn, v[i][k]);
        mx = std::max(mx, v[i][k]);
      }
      if (mx < lo[k] || mn > hi[k]) return false;
    }
    return true;
  }
};

Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

void base_rule(const Simplex& s, const QuadCallback& cb) {
  const double vol = s.volume();
  if (s.dim == 2) {
    for (const auto& rp : kTriRule) {
      Point x{0.0, 0.0, 0.0};
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k) x[k] += rp.bary[i] * s.v[i][k];
      cb(x, rp.weight * vol);
    }
  } else {
    for (const auto& rp : kTetRule) {
      Point x{0.0, 0.0, 0.0};
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 3; ++k) x[k] += rp.bary[i] * s.v[i][k];
      cb(x, rp.weight * vol);
    }
  }
}

constexpr int kMaxDepth = 12;

void refine_rule(const Simplex& s, const QuadHint& hint, int depth, const QuadCallback& cb) {
  if (depth >= kMaxDepth || s.diameter() <= hint.length_scale) {
    base_rule(s, cb);
    return;
  }
  if (hint.has_support && !s.intersects_box(hint.support_lo, hint.support_hi)) {
    base_rule(s, cb);
    return;
  }
  if (s.dim == 2) {
    const Point m01 = midpoint(s.v[0], s.v[1]);
    const Point m02 = midpoint(s.v[0], s.v[2]);
    const Point m12 = midpoint(s.v[1], s.v[2]);
    const Simplex children[4] = {
        {{s.v[0], m01, m02, {}}, 2},
        {{m01, s.v[1], m12, {}}, 2},
        {{m02, m12, s.v[2], {}}, 2},
        {{m01, m12, m02, {}}, 2},
    };
    for (const auto& c : children) refine_rule(c, hint, depth + 1, cb);
  } else {
    const Point m01 = midpoint(s.v[0], s.v[1]), m02 = midpoint(s.v[0], s.v[2]);
    const Point m03 = midpoint(s.v[0], s.v[3]), m12 = midpoint(s.v[1], s.v[2]);
    const Point m13 = midpoint(s.v[1], s.v[3]), m23 = midpoint(s.v[2], s.v[3]);
    // 4 corner tets plus the inner octahedron split along the m01-m23 diagonal.
    const Simplex children[8] = {
        {{s.v[0], m01, m02, m03}, 3},
        {{m01, s.v[1], m12, m13}, 3},
        {{m02, m12, s.v[2], m23}, 3},
        {{m03, m13, m23, s.v[3]}, 3},
        {{m01, m23, m02, m03}, 3},
        {{m01, m23, m03, m13}, 3},
        {{m01, m23, m13, m12}, 3},
        {{m01, m23, m12, m02}, 3},
    };
    for (const auto& c : children) refine_rule(c, hint, depth + 1, cb);
  }
}

}  // namespace

void cell_quadrature(const Mesh& mesh, int cell, const QuadHint* hint, const QuadCallback& cb) {
  Simplex s;
  s.dim = mesh.dim;
  for (int i = 0; i <= mesh.dim; ++i) s.v[i] = mesh.vertices[mesh.cells[cell][i]];
  if (hint == nullptr || hint->length_scale <= 0.0) {
    base_rule(s, cb);
    return;
  }
  refine_rule(s, *hint, 0, cb);
}

double integrate(const Mesh& mesh, const std::function<double(const Point&, int)>& f,
                 const QuadHint* hint) {
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    cell_quadrature(mesh, c, hint, [&](const Point& x, double w) { total += w * f(x, c); });
  }
  return total;
}

}  // namespace driftlab
