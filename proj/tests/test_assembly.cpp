#include "doctest.h"
#include "driftlab/assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <random>
#include <sstream>

using namespace driftlab;

namespace {

CoefficientSet poisson_coeffs() {
  CoefficientSet c;
  c.A = MatrixField::identity();
  c.alpha = 1.0;
  c.E = VectorField::zero();
  c.a = ScalarField::constant(0.0);
  c.f = ScalarField::constant(1.0);
  return c;
}

Eigen::MatrixXd dense(const SparseOperator& op) { return Eigen::MatrixXd(op.mat); }

double rel_transpose_gap(const SparseOperator& primal, const SparseOperator& adjoint) {
  const Eigen::MatrixXd p = dense(primal), a = dense(adjoint);
  const double denom = p.cwiseAbs().maxCoeff();
  return (a - p.transpose()).cwiseAbs().maxCoeff() / denom;
}

}  // namespace

TEST_CASE("2D P1 Laplacian on 2x2 square: single interior node, diagonal 4") {
  const Mesh m = build_box_mesh(2, {2, 2, 0}, Box{});
  auto [op, load] = assemble_primal(m, poisson_coeffs());
  REQUIRE(op.mat.rows() == 1);
  CHECK(op.mat.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  // Load for f=1: integral of the hat at the center node = h^2 = 1/4.
  CHECK(load.vec[0] == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("constant drift adds nothing to the symmetric-hat diagonal") {
  const Mesh m = build_box_mesh(2, {2, 2, 0}, Box{});
  CoefficientSet c = poisson_coeffs();
  c.E = VectorField::constant({3.0, -2.0, 0.0});
  auto [op, load] = assemble_primal(m, c);
  CHECK(op.mat.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("reaction term is gamma times the consistent mass matrix") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  CoefficientSet c0 = poisson_coeffs();
  CoefficientSet cg = poisson_coeffs();
  const double gamma = 2.5;
  cg.a = ScalarField::constant(gamma);
  auto [op0, l0] = assemble_primal(m, c0);
  auto [opg, lg] = assemble_primal(m, cg);
  const Eigen::MatrixXd mass = dense(assemble_mass(m));
  const Eigen::MatrixXd diff = dense(opg) - dense(op0);
  CHECK((diff - gamma * mass).cwiseAbs().maxCoeff() < 1e-12 * mass.cwiseAbs().maxCoeff());
}

TEST_CASE("adjoint matrix is the transpose of the primal matrix") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  SUBCASE("2D with expression coefficients") {
    const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
    CoefficientSet c = poisson_coeffs();
    c.E = VectorField(ScalarField::from_expr(parse_expr("sin(3*x1)+x2")),
                      ScalarField::from_expr(parse_expr("cos(2*x2)")));
    c.a = ScalarField::from_expr(parse_expr("x1*x2"));
    auto [p, pl] = assemble_primal(m, c);
    auto [a, al] = assemble_adjoint(m, c);
    CHECK(rel_transpose_gap(p, a) <= 1e-13);
  }

  SUBCASE("3D with nonsymmetric constant A") {
    const Mesh m = build_box_mesh(3, {2, 2, 2}, Box{});
    CoefficientSet c = poisson_coeffs();
    Mat3 A{{{2.0, 0.3, 0.0}, {-0.1, 1.5, 0.2}, {0.0, 0.1, 1.0}}};
    c.A = MatrixField::constant(A);
    c.alpha = 0.5;
    c.E = VectorField::constant({unif(rng), unif(rng), unif(rng)});
    auto [p, pl] = assemble_primal(m, c);
    auto [a, al] = assemble_adjoint(m, c);
    CHECK(rel_transpose_gap(p, a) <= 1e-13);
  }

  SUBCASE("E=0 and symmetric A gives a symmetric matrix") {
    const Mesh m = build_box_mesh(2, {3, 3, 0}, Box{});
    auto [p, pl] = assemble_primal(m, poisson_coeffs());
    auto [a, al] = assemble_adjoint(m, poisson_coeffs());
    CHECK((dense(p) - dense(a)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("Dirichlet Laplacian is SPD (Rayleigh probe)") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  const SparseOperator k = assemble_riesz(m);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v(k.mat.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    CHECK(v.dot(k.mat * v) > 0.0);
  }
  // Cholesky-style factorization succeeds.
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(Eigen::SparseMatrix<double>(k.mat));
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("riesz equals primal with A=I, E=0, a=0") {
  const Mesh m = build_box_mesh(2, {2, 2, 0}, Box{});
  const SparseOperator k = assemble_riesz(m);
  REQUIRE(k.mat.rows() == 1);
  CHECK(k.mat.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  auto [p, pl] = assemble_primal(m, poisson_coeffs());
  CHECK((dense(k) - dense(p)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembly is linear in each coefficient (superposition)") {
  const Mesh m = build_box_mesh(2, {3, 3, 0}, Box{});
  CoefficientSet c1 = poisson_coeffs();
  c1.E = VectorField::constant({1.0, 2.0, 0.0});
  c1.a = ScalarField::constant(0.5);
  CoefficientSet c2 = poisson_coeffs();
  c2.E = VectorField::constant({-0.5, 1.0, 0.0});
  c2.a = ScalarField::constant(1.5);
  CoefficientSet csum = poisson_coeffs();
  csum.A = MatrixField::constant(Mat3{{{2.0, 0, 0}, {0, 2.0, 0}, {0, 0, 2.0}}});
  csum.E = VectorField::constant({0.5, 3.0, 0.0});
  csum.a = ScalarField::constant(2.0);
  csum.f = ScalarField::constant(2.0);
  auto [m1, l1] = assemble_primal(m, c1);
  auto [m2, l2] = assemble_primal(m, c2);
  auto [ms, ls] = assemble_primal(m, csum);
  const double scale = dense(ms).cwiseAbs().maxCoeff();
  CHECK((dense(ms) - dense(m1) - dense(m2)).cwiseAbs().maxCoeff() < 1e-12 * scale);
  CHECK((ls.vec - l1.vec - l2.vec).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("drift-free positive definiteness survives discretization") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  CoefficientSet c = poisson_coeffs();
  c.a = ScalarField::from_expr(parse_expr("x1+x2"));
  auto [op, load] = assemble_primal(m, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("deterministic assembly: byte-identical across runs") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  CoefficientSet c = poisson_coeffs();
  c.E = VectorField(ScalarField::from_expr(parse_expr("sin(5*x1)")),
                    ScalarField::from_expr(parse_expr("cos(3*x2)")));
  auto [op1, l1] = assemble_primal(m, c);
  auto [op2, l2] = assemble_primal(m, c);
  std::ostringstream s1, s2;
  dump_matrix(op1, s1);
  dump_matrix(op2, s2);
  CHECK(s1.str() == s2.str());
  CHECK(l1.vec == l2.vec);
}

TEST_CASE("nonlinear regularization term") {
  const Mesh m = build_box_mesh(3, {2, 2, 2}, Box{});
  SUBCASE("g in 3D is |s|^4 s") {
    CHECK(regularization_g(3, 2.0) == doctest::Approx(32.0));
    CHECK(regularization_g(3, -2.0) == doctest::Approx(-32.0));
  }
  SUBCASE("g' is nonnegative (monotone)") {
    for (double s : {-3.0, -0.5, 0.0, 0.7, 10.0}) {
      CHECK(regularization_g_prime(3, s) >= 0.0);
      CHECK(regularization_g_prime(2, s) >= 0.0);
    }
    CHECK(regularization_g_prime(3, 2.0) == doctest::Approx(5.0 * 16.0));
  }
  SUBCASE("w=0 gives zero residual and zero Jacobian") {
    const Eigen::VectorXd w = Eigen::VectorXd::Zero(m.n_interior());
    auto [res, jac] = assemble_nonlinear_term(m, w, 0.5);
    CHECK(res.cwiseAbs().maxCoeff() == 0.0);
    CHECK(jac.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("overflow reported") {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(m.n_interior(), 1e200);
    CHECK_THROWS_AS(assemble_nonlinear_term(m, w, 1.0), AssemblyError);
  }
}

TEST_CASE("mesh Peclet number") {
  const Mesh m = build_box_mesh(2, {4, 4, 0}, Box{});
  CoefficientSet c = poisson_coeffs();
  c.E = VectorField::constant({2.0, 0.0, 0.0});
  // h_cell = diag of a 1/4 square; Pe = |E| h / (2 alpha).
  CHECK(mesh_peclet(m, c) == doctest::Approx(2.0 * m.h / 2.0).epsilon(1e-12));
}

TEST_CASE("matrix dump is sorted coordinate text") {
  const Mesh m = build_box_mesh(2, {3, 3, 0}, Box{});
  auto [op, load] = assemble_primal(m, poisson_coeffs());
  std::ostringstream os;
  dump_matrix(op, os);
  std::istringstream is(os.str());
  int pi = -1, pj = -1, i, j;
  double v;
  while (is >> i >> j >> v) {
    CHECK((i > pi || (i == pi && j > pj)));
    pi = i;
    pj = j;
  }
}
