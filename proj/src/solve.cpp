#include "driftlab/solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <iostream>

namespace driftlab {

namespace {

double relative_residual(const SparseOperator& op, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& rhs) {
  const double denom = rhs.norm();
  const double num = (op.mat * x - rhs).norm();
  return denom > 0.0 ? num / denom : num;
}

}  // namespace

Eigen::VectorXd solve_linear(const SparseOperator& op, const Eigen::VectorXd& rhs,
                             const LinearOptions& opts) {
  if (op.mat.rows() != op.mat.cols()) throw SolveError("solve_linear: operator not square");
  if (rhs.size() != op.mat.rows()) throw SolveError("solve_linear: rhs size mismatch");

  Eigen::VectorXd x;
  if (opts.method == LinearMethod::DirectLU) {
    Eigen::SparseMatrix<double> a = op.mat;  // SparseLU wants column-major
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
      throw SingularMatrixError("solve_linear: LU factorization failed (singular matrix)");
    x = lu.solve(rhs);
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(opts.tol * 1e-2);
    solver.setMaxIterations(opts.max_iterations);
    solver.compute(op.mat);
    if (solver.info() != Eigen::Success)
      throw SingularMatrixError("solve_linear: BiCGSTAB preconditioner setup failed");
    x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("solve_linear: BiCGSTAB did not converge", x,
                             relative_residual(op, x, rhs));
    }
  }
  const double res = relative_residual(op, x, rhs);
  if (!(res <= opts.tol))
    throw ConvergenceError("solve_linear: residual certificate failed", x, res);
  return x;
}

Solution to_solution(const Mesh& mesh, const Eigen::VectorXd& interior) {
  Solution s;
  s.mesh_tag = mesh.tag;
  s.nodal = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.interior_index[v] >= 0) s.nodal[v] = interior[mesh.interior_index[v]];
  return s;
}

Eigen::VectorXd interior_part(const Mesh& mesh, const Solution& u) {
  Eigen::VectorXd x(mesh.n_interior());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.interior_index[v] >= 0) x[mesh.interior_index[v]] = u.nodal[v];
  return x;
}

namespace {

SolveReport solve_form(const Mesh& mesh, const CoefficientSet& coeffs, const LinearOptions& opts,
                       bool adjoint) {
  auto [op, load] = adjoint ? assemble_adjoint(mesh, coeffs) : assemble_primal(mesh, coeffs);
  SolveReport report;
  report.peclet = mesh_peclet(mesh, coeffs);
  report.peclet_warning = report.peclet > 1.0;
  if (report.peclet_warning)
    std::cerr << "driftlab: warning: mesh Peclet " << report.peclet
              << " > 1; Galerkin solution may be polluted\n";
  Eigen::VectorXd x = solve_linear(op, load.vec, opts);
  report.solution = to_solution(mesh, x);
  report.solution.residual = relative_residual(op, x, load.vec);
  report.solution.method = opts.method == LinearMethod::DirectLU ? "direct-LU" : "bicgstab";
  return report;
}

}  // namespace

SolveReport solve_primal(const Mesh& mesh, const CoefficientSet& coeffs,
                         const LinearOptions& opts) {
  return solve_form(mesh, coeffs, opts, false);
}

SolveReport solve_adjoint(const Mesh& mesh, const CoefficientSet& coeffs,
                          const LinearOptions& opts) {
  return solve_form(mesh, coeffs, opts, true);
}

RegularizedReport solve_regularized(const Mesh& mesh, const CoefficientSet& coeffs, double delta,
                                    const NewtonOptions& opts) {
  if (!(delta > 0.0)) throw SolveError("solve_regularized: delta must be > 0");
  auto [op, load] = assemble_primal(mesh, coeffs);
  const Eigen::VectorXd& rhs = load.vec;
  const double rhs_scale = std::max(rhs.norm(), 1e-300);

  // Start from the linear solution when it solves cleanly; g is monotone so
  // the zero start is a safe fallback.
  Eigen::VectorXd w;
  try {
    w = solve_linear(op, rhs, opts.linear);
  } catch (const SolveError&) {
    w = Eigen::VectorXd::Zero(rhs.size());
  }

  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    auto [gres, gjac] = assemble_nonlinear_term(mesh, v, delta);
    (void)gjac;
    return op.mat * v + gres - rhs;
  };

  Eigen::VectorXd F = residual(w);
  double fnorm = F.norm();
  int steps = 0;
  while (fnorm / rhs_scale > opts.tol && steps < opts.max_steps) {
    auto [gres, gjac] = assemble_nonlinear_term(mesh, w, delta);
    SparseOperator jac;
    jac.mesh_tag = op.mesh_tag;
    jac.mat = op.mat;
    for (Eigen::Index i = 0; i < gjac.size(); ++i) jac.mat.coeffRef(i, i) += gjac[i];

    LinearOptions lin = opts.linear;
    lin.tol = 1e-8;  // inner solves need not be tighter than the Newton tol
    Eigen::VectorXd step = solve_linear(jac, -F, lin);

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      Eigen::VectorXd trial = w + t * step;
      Eigen::VectorXd Ft;
      try {
        Ft = residual(trial);
      } catch (const AssemblyError&) {
        t *= 0.5;  // g overflowed; damp harder
        continue;
      }
      const double fn = Ft.norm();
      if (fn <= (1.0 - 1e-4 * t) * fnorm) {
        w = std::move(trial);
        F = std::move(Ft);
        fnorm = fn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++steps;
    if (!accepted)
      throw ConvergenceError("solve_regularized: Newton line search stalled", w,
                             fnorm / rhs_scale);
  }
  if (fnorm / rhs_scale > opts.tol)
    throw ConvergenceError("solve_regularized: Newton did not converge in max steps", w,
                           fnorm / rhs_scale);

  RegularizedReport report;
  report.newton_steps = steps;
  report.solution = to_solution(mesh, w);
  report.solution.residual = fnorm / rhs_scale;
  report.solution.method = "newton";
  report.solution.iterations = steps;
  return report;
}

}  // namespace driftlab
