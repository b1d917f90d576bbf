#include "driftlab/control.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftlab/assembly.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/quadrature.hpp"
#include "driftlab/solve.hpp"

namespace driftlab {

namespace {

VectorField combine_basis(const std::vector<VectorField>& basis, const std::vector<double>& c) {
  return VectorField::from_function([basis, c](const Point& x, int cell) {
    Vec3 out{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Vec3 b = basis[k](x, cell);
      for (int i = 0; i < 3; ++i) out[i] += c[k] * b[i];
    }
    return out;
  });
}

CoefficientSet problem_coeffs(const ControlProblem& prob, const std::vector<double>& c) {
  CoefficientSet coeffs;
  coeffs.A = prob.A;
  coeffs.alpha = prob.alpha;
  coeffs.E = combine_basis(prob.basis, c);
  coeffs.a = prob.a;
  coeffs.f = prob.f;
  return coeffs;
}

void check_c(const ControlProblem& prob, const std::vector<double>& c) {
  if (c.size() != prob.basis.size()) throw ControlError("coefficient/basis size mismatch");
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c[k] < prob.c_lo[k] - 1e-12 || c[k] > prob.c_hi[k] + 1e-12)
      throw ControlError("coefficient " + std::to_string(k) + " outside bounds");
}

std::vector<double> project(const ControlProblem& prob, std::vector<double> c) {
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = std::min(prob.c_hi[k], std::max(prob.c_lo[k], c[k]));
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

ControlProblem default_control_problem(double mu) {
  ControlProblem prob;
  prob.mesh = build_box_mesh(2, {8, 8, 0}, Box{});
  prob.f = ScalarField::constant(1.0);
  prob.G = parse_expr("s*s");
  prob.G_s = parse_expr("2*s");
  prob.mu = mu;
  prob.p = 3.0;
  prob.basis.emplace_back(ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(pi*x2)")),
                          ScalarField::constant(0.0));
  prob.basis.emplace_back(ScalarField::constant(0.0),
                          ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(pi*x2)")));
  prob.basis.emplace_back(ScalarField::from_expr(parse_expr("sin(2*pi*x1)*sin(pi*x2)")),
                          ScalarField::from_expr(parse_expr("sin(pi*x1)*sin(2*pi*x2)")));
  prob.c_lo = {-2.0, -2.0, -2.0};
  prob.c_hi = {2.0, 2.0, 2.0};
  prob.a_G = 0.0;
  prob.b_G = 0.0;
  return prob;
}

void validate_control(const ControlProblem& prob) {
  if (!prob.G.valid() || !prob.G_s.valid()) throw ControlError("G and G_s must be supplied");
  if (!(prob.mu > 0.0)) throw ControlError("mu must be > 0");
  const int N = prob.mesh.dim;
  if (N == 2 ? !(prob.p > 2.0) : !(prob.p >= N))
    throw ControlError("p out of range: need p > 2 (N=2) or p >= N (N=3)");
  if (prob.basis.empty()) throw ControlError("empty basis");
  if (prob.c_lo.size() != prob.basis.size() || prob.c_hi.size() != prob.basis.size())
    throw ControlError("bounds/basis size mismatch");
  for (std::size_t k = 0; k < prob.basis.size(); ++k)
    if (!(prob.c_lo[k] <= prob.c_hi[k])) throw ControlError("empty bound interval");
  // Sampled checks: G_s really is dG/ds, and the growth floor holds.
  const double svals[] = {-10.0, -3.0, -0.7, 0.0, 0.4, 2.5, 10.0};
  for (int vi = 0; vi < prob.mesh.n_vertices(); vi += 7) {
    const Point& x = prob.mesh.vertices[vi];
    for (double s : svals) {
      const double hstep = 1e-5 * (1.0 + std::abs(s));
      const double fd =
          (prob.G.eval(x, s + hstep) - prob.G.eval(x, s - hstep)) / (2.0 * hstep);
      if (std::abs(fd - prob.G_s.eval(x, s)) > 1e-6 * (1.0 + std::abs(fd)))
        throw ControlError("G_s does not match dG/ds at a sample point");
      if (prob.G.eval(x, s) < prob.a_G - prob.b_G * std::abs(s) - 1e-9)
        throw ControlError("G violates the declared growth floor G >= a_G - b_G|s|");
    }
  }
}

double eval_objective(const ControlProblem& prob, const std::vector<double>& c) {
  check_c(prob, c);
  const Mesh& mesh = prob.mesh;
  const CoefficientSet coeffs = problem_coeffs(prob, c);
  const Solution u = solve_primal(mesh, coeffs).solution;
  double J = 0.0;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    cell_quadrature(mesh, cell, nullptr, [&](const Point& x, double w) {
      const double s = p1_value(mesh, cell, u.nodal, x);
      const Vec3 E = coeffs.E(x, cell);
      double e2 = 0.0;
      for (int i = 0; i < 3; ++i) e2 += E[i] * E[i];
      J += w * (prob.G.eval(x, s) + prob.mu * std::pow(e2, prob.p / 2.0));
    });
  }
  return J;
}

std::vector<double> eval_gradient(const ControlProblem& prob, const std::vector<double>& c) {
  check_c(prob, c);
  const Mesh& mesh = prob.mesh;
  CoefficientSet coeffs = problem_coeffs(prob, c);
  const Solution u = solve_primal(mesh, coeffs).solution;

  // Adjoint right-hand side -G_s(x, u_h(x)), evaluated with the same
  // quadrature as every other load.
  CoefficientSet adj = coeffs;
  const Expr G_s = prob.G_s;
  adj.f = ScalarField::from_function([&mesh, G_s, u](const Point& x, int cell) {
    if (cell < 0) throw ControlError("adjoint rhs needs a cell index");
    return -G_s.eval(x, p1_value(mesh, cell, u.nodal, x));
  });
  const Solution pi = solve_adjoint(mesh, adj).solution;

  std::vector<double> grad(prob.basis.size(), 0.0);
  const double mup = prob.mu * prob.p;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const Vec3 gpi = p1_gradient(mesh, cell, pi.nodal);
    cell_quadrature(mesh, cell, nullptr, [&](const Point& x, double w) {
      const double uh = p1_value(mesh, cell, u.nodal, x);
      const Vec3 E = coeffs.E(x, cell);
      double e2 = 0.0;
      for (int i = 0; i < 3; ++i) e2 += E[i] * E[i];
      const double epow = e2 > 0.0 ? std::pow(e2, (prob.p - 2.0) / 2.0) : 0.0;
      for (std::size_t k = 0; k < prob.basis.size(); ++k) {
        const Vec3 b = prob.basis[k](x, cell);
        double term = 0.0;
        for (int i = 0; i < 3; ++i) term += (uh * gpi[i] + mup * epow * E[i]) * b[i];
        grad[k] += w * term;
      }
    });
  }
  return grad;
}

OptimizeResult optimize(const ControlProblem& prob, std::vector<double> c0, int steps) {
  if (steps < 1) throw ControlError("optimize: steps must be >= 1");
  validate_control(prob);
  OptimizeResult res;
  res.c = project(prob, std::move(c0));
  res.J = eval_objective(prob, res.c);
  double t = 0.0;
  for (int iter = 1; iter <= steps; ++iter) {
    const std::vector<double> g = eval_gradient(prob, res.c);
    const double gnorm = std::sqrt(dot(g, g));
    if (iter == 1) res.trace.push_back({0, res.J, gnorm, 0.0});
    if (gnorm < 1e-12 * (1.0 + std::abs(res.J))) break;
    // First trial step scaled to the gradient; afterwards, doubled last
    // accepted step (Armijo backtracking brings it down again if needed).
    double trial = (t == 0.0) ? std::min(1.0, 1.0 / gnorm) : 2.0 * t;
    bool accepted = false;
    for (int back = 0; back < 10; ++back) {
      std::vector<double> cand(res.c.size());
      for (std::size_t k = 0; k < cand.size(); ++k) cand[k] = res.c[k] - trial * g[k];
      cand = project(prob, cand);
      std::vector<double> diff(res.c.size());
      for (std::size_t k = 0; k < cand.size(); ++k) diff[k] = res.c[k] - cand[k];
      const double Jc = eval_objective(prob, cand);
      if (Jc <= res.J - 1e-4 * dot(g, diff)) {
        res.c = cand;
        res.J = Jc;
        t = trial;
        res.trace.push_back({iter, res.J, gnorm, t});
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }
  }
  return res;
}

std::string render_trace(const OptimizeResult& result) {
  std::ostringstream out;
  out << "iter,J,grad_norm,step\n";
  char buf[40];
  for (const auto& tp : result.trace) {
    out << tp.iter << ',';
    std::snprintf(buf, sizeof(buf), "%.17e", tp.J);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17e", tp.grad_norm);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17e", tp.step);
    out << buf << '\n';
  }
  return out.str();
}

void write_trace(const OptimizeResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ControlError("cannot open trace file: " + path);
  out << render_trace(result);
  if (!out) throw ControlError("write failed: " + path);
}

}  // namespace driftlab
