#include "doctest.h"
#include "driftlab/fields.hpp"

#include <cmath>

using namespace driftlab;

namespace {

DriftSequenceSpec concentrating_spec_3d() {
  DriftSequenceSpec spec;
  spec.kind = DriftKind::Concentrating;
  spec.dim = 3;
  spec.E0 = VectorField::zero();
  spec.beta = 1.0;
  spec.center = {0.5, 0.5, 0.5};
  spec.direction = {0.0, 0.0, 1.0};
  return spec;
}

DriftSequenceSpec oscillatory_spec_2d(Vec3 e0 = {0.0, 0.0, 0.0}) {
  DriftSequenceSpec spec;
  spec.kind = DriftKind::Oscillatory;
  spec.dim = 2;
  spec.E0 = VectorField::constant(e0);
  spec.beta = 1.0;
  spec.r = 4.0;
  return spec;
}

}  // namespace

TEST_CASE("constant kind ignores n") {
  DriftSequenceSpec spec;
  spec.kind = DriftKind::Constant;
  spec.dim = 2;
  spec.r = 4.0;
  spec.E0 = VectorField::constant({1.5, -0.5, 0.0});
  const VectorField e = make_drift_field(spec, 7);
  const Vec3 v = e({0.3, 0.4, 0.0});
  CHECK(v[0] == doctest::Approx(1.5));
  CHECK(v[1] == doctest::Approx(-0.5));
}

TEST_CASE("concentrating family: L^N mass constant in n") {
  // Substitution oracle: with the normalized bump, int |E_n|^3 = beta^3 for
  // every n in 3D.
  const Mesh m = build_box_mesh(3, {4, 4, 4}, Box{});
  const DriftSequenceSpec spec = concentrating_spec_3d();
  for (int n : {2, 4, 8}) {
    const VectorField e = make_drift_field(spec, n);
    const double mass = std::pow(field_Lq_norm(m, e, 3.0), 3.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
  // n = 1 clips the bump at the box boundary, so some mass is lost.
  const double clipped =
      std::pow(field_Lq_norm(m, make_drift_field(spec, 1), 3.0), 3.0);
  CHECK(clipped > 0.8);
  CHECK(clipped < 1.0);
}

TEST_CASE("oscillatory with zero base: pairings vanish as n grows") {
  const Mesh m = build_box_mesh(2, {8, 8, 0}, Box{});
  const DriftSequenceSpec spec = oscillatory_spec_2d();
  const VectorField phi(
      ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(pi*x2)")),
      ScalarField::from_expr(parse_expr("x1*(1-x1)*x2*(1-x2)")));
  const auto rows = weak_limit_probe(m, spec, {1, 4, 16, 64}, {phi});
  REQUIRE(rows.size() == 4);
  // Riemann-Lebesgue: |pairing| decreasing toward zero.
  CHECK(std::abs(rows[3].pairing) < 1e-2 * std::abs(rows[0].pairing) + 1e-10);
  CHECK(std::abs(rows[3].pairing) < 1e-4);
}

TEST_CASE("oscillatory with nonzero base converges to base pairing") {
  const Mesh m = build_box_mesh(2, {8, 8, 0}, Box{});
  const DriftSequenceSpec spec = oscillatory_spec_2d({0.7, 0.2, 0.0});
  const VectorField phi(
      ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(pi*x2)")),
      ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(pi*x2)")));
  // Quadrature oracle for the limit: int E0 . phi.
  const double limit = integrate(m, [&](const Point& x, int c) {
    const Vec3 p = phi(x, c);
    return 0.7 * p[0] + 0.2 * p[1];
  });
  const auto rows = weak_limit_probe(m, spec, {1, 32}, {phi});
  CHECK(std::abs(rows[1].pairing - limit) < 1e-3);
  CHECK(std::abs(rows[1].pairing - limit) < 0.1 * std::abs(rows[0].pairing - limit) + 1e-12);
}

TEST_CASE("concentrating pairings decay like n^(1-N)") {
  const Mesh m = build_box_mesh(3, {4, 4, 4}, Box{});
  const DriftSequenceSpec spec = concentrating_spec_3d();
  const VectorField phi = VectorField::constant({0.0, 0.0, 1.0});
  const auto rows = weak_limit_probe(m, spec, {2, 4, 8}, {phi});
  // Doubling n divides the pairing by ~4 in 3D.
  CHECK(rows[1].pairing == doctest::Approx(rows[0].pairing / 4.0).epsilon(0.05));
  CHECK(rows[2].pairing == doctest::Approx(rows[1].pairing / 4.0).epsilon(0.05));
}

TEST_CASE("equi-integrability profile") {
  const Mesh m2 = build_box_mesh(2, {8, 8, 0}, Box{});

  SUBCASE("constant field bounded by M0: theta vanishes above M0") {
    DriftSequenceSpec spec;
    spec.kind = DriftKind::Constant;
    spec.dim = 2;
    spec.r = 4.0;
    spec.E0 = VectorField::constant({1.0, 0.0, 0.0});
    const auto rows = equi_integrability_profile(m2, spec, {1, 3}, {0.5, 2.0, 4.0});
    for (const auto& row : rows) {
      if (row.M > 1.0) CHECK(row.theta == doctest::Approx(0.0));
      else CHECK(row.theta > 0.0);
    }
  }

  SUBCASE("oscillatory family is equi-integrable") {
    const DriftSequenceSpec spec = oscillatory_spec_2d({0.5, 0.0, 0.0});
    const auto rows = equi_integrability_profile(m2, spec, {1, 2, 4, 8}, {1.0, 2.0});
    double max_theta_m2 = 0.0;
    for (const auto& row : rows)
      if (row.M == 2.0) max_theta_m2 = std::max(max_theta_m2, row.theta);
    CHECK(max_theta_m2 == doctest::Approx(0.0));  // |E_n| <= 1.5 < 2 uniformly
  }

  SUBCASE("concentrating family is not equi-integrable") {
    const Mesh m3 = build_box_mesh(3, {4, 4, 4}, Box{});
    const auto rows =
        equi_integrability_profile(m3, concentrating_spec_3d(), {1, 8, 32}, {2.0, 4.0});
    // theta(n, M) -> full L^3 mass (=1) for n large at fixed M.
    double theta_large_n = 0.0;
    for (const auto& row : rows)
      if (row.n == 32 && row.M == 4.0) theta_large_n = row.theta;
    CHECK(theta_large_n > 0.9);
  }

  SUBCASE("theta nonincreasing in M") {
    const auto rows = equi_integrability_profile(m2, oscillatory_spec_2d({0.5, 0.0, 0.0}),
                                                 {1, 4}, {0.1, 0.5, 1.0, 1.4});
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].n == rows[i - 1].n) CHECK(rows[i].theta <= rows[i - 1].theta + 1e-14);
  }
}

TEST_CASE("drift generator input validation") {
  DriftSequenceSpec spec = oscillatory_spec_2d();
  CHECK_THROWS_AS(make_drift_field(spec, 0), FieldError);
  spec.beta = -1.0;
  CHECK_THROWS_AS(make_drift_field(spec, 1), FieldError);

  DriftSequenceSpec conc = concentrating_spec_3d();
  conc.center = {2.0, 0.5, 0.5};  // outside the unit box
  CHECK_THROWS_AS(make_drift_field(conc, 1), FieldError);
}

TEST_CASE("coefficient validation") {
  const Mesh m = build_box_mesh(2, {2, 2, 0}, Box{});
  CoefficientSet good;
  good.A = MatrixField::identity();
  good.alpha = 1.0;
  good.E = VectorField::zero();
  good.a = ScalarField::constant(0.0);
  good.f = ScalarField::constant(1.0);
  CHECK_NOTHROW(validate_coefficients(m, good));

  CoefficientSet bad = good;
  bad.alpha = 2.0;  // identity is not 2-elliptic
  CHECK_THROWS_AS(validate_coefficients(m, bad), FieldError);

  CoefficientSet neg = good;
  neg.a = ScalarField::from_expr(parse_expr("0 - 1"));
  CHECK_THROWS_AS(validate_coefficients(m, neg), FieldError);

  CoefficientSet below_gamma = good;
  below_gamma.a = ScalarField::constant(0.5);
  below_gamma.gamma = 1.0;
  CHECK_THROWS_AS(validate_coefficients(m, below_gamma), FieldError);
}

TEST_CASE("cell table field requires a cell index") {
  const Mesh m = build_box_mesh(2, {1, 1, 0}, Box{});
  const ScalarField t = ScalarField::cell_table(m.tag, {1.0, 2.0});
  CHECK(t({0.1, 0.1, 0.0}, 0) == doctest::Approx(1.0));
  CHECK(t({0.1, 0.1, 0.0}, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(t({0.1, 0.1, 0.0}), FieldError);
}
