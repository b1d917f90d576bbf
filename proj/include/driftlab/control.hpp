#pragma once

#include <string>
#include <vector>

#include "driftlab/expr.hpp"
#include "driftlab/fields.hpp"
#include "driftlab/mesh.hpp"

namespace driftlab {

struct ControlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimize J(c) = int G(x, u_c) + mu int |E(c)|^p over drift coefficients
/// c, with E(c) = sum_k c_k B_k and u_c solving the primal problem.
struct ControlProblem {
  Mesh mesh;
  MatrixField A;
  double alpha = 1.0;
  ScalarField a;
  ScalarField f = ScalarField::constant(1.0);
  Expr G;    // integrand G(x1..x3, s)
  Expr G_s;  // dG/ds, supplied symbolically (see validate_control)
  double mu = 1.0;
  double p = 3.0;  // > 2 if N == 2, >= N if N == 3
  std::vector<VectorField> basis;
  std::vector<double> c_lo, c_hi;  // box bounds on c
  double a_G = 0.0, b_G = 0.0;     // declared growth floor G(x,s) >= a_G - b_G|s|
};

/// Coarse-mesh default: 2D, 3 sine-product basis fields, G = s^2.
ControlProblem default_control_problem(double mu = 1.0);

/// Checks p range, bounds shape, that G_s matches dG/ds by sampled finite
/// differences, and the growth floor on a sample grid.
void validate_control(const ControlProblem& prob);

double eval_objective(const ControlProblem& prob, const std::vector<double>& c);

/// Adjoint gradient: solve primal u, then adjoint with rhs -G_s(x, u);
/// component k = int (u grad(pi) + mu p |E|^(p-2) E) . B_k.
std::vector<double> eval_gradient(const ControlProblem& prob, const std::vector<double>& c);

struct TracePoint {
  int iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct OptimizeResult {
  std::vector<double> c;
  double J = 0.0;
  std::vector<TracePoint> trace;
  bool stalled = false;
};

/// Projected gradient descent with Armijo backtracking; the J trace is
/// nonincreasing; stalls after 10 rejected backtracks at a point.
OptimizeResult optimize(const ControlProblem& prob, std::vector<double> c0, int steps);

/// CSV trace `iter,J,grad_norm,step`.
void write_trace(const OptimizeResult& result, const std::string& path);
std::string render_trace(const OptimizeResult& result);

}  // namespace driftlab
