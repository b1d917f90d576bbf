#pragma once

#include <Eigen/Dense>
#include <string>

#include "driftlab/assembly.hpp"

namespace driftlab {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularMatrixError : SolveError {
  using SolveError::SolveError;
};
/// Iterative non-convergence / Newton stall; carries the best iterate.
struct ConvergenceError : SolveError {
  ConvergenceError(const std::string& msg, Eigen::VectorXd best, double residual)
      : SolveError(msg), best_iterate(std::move(best)), residual(residual) {}
  Eigen::VectorXd best_iterate;
  double residual;
};

enum class LinearMethod { DirectLU, BiCGSTAB };

struct LinearOptions {
  LinearMethod method = LinearMethod::DirectLU;
  double tol = 1e-10;
  int max_iterations = 10000;
};

/// Solves op x = rhs and certifies ||op x - rhs||_2 / ||rhs||_2 <= tol.
Eigen::VectorXd solve_linear(const SparseOperator& op, const Eigen::VectorXd& rhs,
                             const LinearOptions& opts = {});

/// Nodal coefficients over all mesh vertices, zero at boundary nodes.
struct Solution {
  Eigen::VectorXd nodal;
  std::uint64_t mesh_tag = 0;
  double residual = 0.0;
  std::string method;
  int iterations = 0;
  bool converged = true;
};

/// Scatter an interior vector to a full nodal Solution (zero boundary).
Solution to_solution(const Mesh& mesh, const Eigen::VectorXd& interior);
Eigen::VectorXd interior_part(const Mesh& mesh, const Solution& u);

struct SolveReport {
  Solution solution;
  double peclet = 0.0;
  bool peclet_warning = false;
};

SolveReport solve_primal(const Mesh& mesh, const CoefficientSet& coeffs,
                         const LinearOptions& opts = {});
SolveReport solve_adjoint(const Mesh& mesh, const CoefficientSet& coeffs,
                          const LinearOptions& opts = {});

struct NewtonOptions {
  double tol = 1e-9;
  int max_steps = 50;
  int max_backtracks = 30;
  LinearOptions linear;
};

struct RegularizedReport {
  Solution solution;
  int newton_steps = 0;
};

/// Damped Newton on F(w) = M w + delta M_L g(w) - rhs for the
/// delta-regularized problem; residual decreases monotonically.
RegularizedReport solve_regularized(const Mesh& mesh, const CoefficientSet& coeffs, double delta,
                                    const NewtonOptions& opts = {});

}  // namespace driftlab
