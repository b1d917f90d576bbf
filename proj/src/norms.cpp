#include "driftlab/norms.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "driftlab/quadrature.hpp"

namespace driftlab {

namespace {

double clamp_k(double s, double k) { return s > k ? k : (s < -k ? -k : s); }

// Gradient of the P1 interpolant on cell c.
Vec3 cell_gradient(const Mesh& mesh, int c, const Eigen::VectorXd& nodal) {
  const int dim = mesh.dim;
  const auto& cell = mesh.cells[c];
  // Solve the (dim x dim) system (X_j - X_0) . g = v_j - v_0 directly.
  const Point& x0 = mesh.vertices[cell[0]];
  double D[3][3] = {}, b[3] = {};
  for (int j = 1; j <= dim; ++j) {
    for (int k = 0; k < dim; ++k) D[j - 1][k] = mesh.vertices[cell[j]][k] - x0[k];
    b[j - 1] = nodal[cell[j]] - nodal[cell[0]];
  }
  Vec3 g{0.0, 0.0, 0.0};
  if (dim == 2) {
    const double det = D[0][0] * D[1][1] - D[0][1] * D[1][0];
    g[0] = (b[0] * D[1][1] - b[1] * D[0][1]) / det;
    g[1] = (D[0][0] * b[1] - D[1][0] * b[0]) / det;
  } else {
    Eigen::Matrix3d M;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
      rhs[i] = b[i];
      for (int k = 0; k < 3; ++k) M(i, k) = D[i][k];
    }
    const Eigen::Vector3d sol = M.partialPivLu().solve(rhs);
    for (int k = 0; k < 3; ++k) g[k] = sol[k];
  }
  return g;
}

std::array<double, 4> barycentric_in_cell(const Mesh& mesh, int c, const Point& x) {
  const int dim = mesh.dim;
  const auto& cell = mesh.cells[c];
  const Point& x0 = mesh.vertices[cell[0]];
  Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (int j = 1; j <= dim; ++j)
    for (int k = 0; k < dim; ++k) M(k, j - 1) = mesh.vertices[cell[j]][k] - x0[k];
  for (int k = 0; k < dim; ++k) rhs[k] = x[k] - x0[k];
  const Eigen::Vector3d lam = M.partialPivLu().solve(rhs);
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  double sum = 0.0;
  for (int j = 1; j <= dim; ++j) {
    out[j] = lam[j - 1];
    sum += lam[j - 1];
  }
  out[0] = 1.0 - sum;
  return out;
}

}  // namespace

double p1_value(const Mesh& mesh, int c, const Eigen::VectorXd& nodal, const Point& x) {
  const auto lam = barycentric_in_cell(mesh, c, x);
  double v = 0.0;
  for (int i = 0; i <= mesh.dim; ++i) v += lam[i] * nodal[mesh.cells[c][i]];
  return v;
}

Vec3 p1_gradient(const Mesh& mesh, int c, const Eigen::VectorXd& nodal) {
  return cell_gradient(mesh, c, nodal);
}

Solution truncate(const Solution& v, double k) {
  if (!(k > 0.0)) throw NormError("truncate: k must be > 0");
  Solution out = v;
  for (Eigen::Index i = 0; i < out.nodal.size(); ++i) out.nodal[i] = clamp_k(out.nodal[i], k);
  return out;
}

Solution log_power_compose(const Solution& v, double q) {
  if (!(q > 0.0)) throw NormError("log_power_compose: q must be > 0");
  Solution out = v;
  for (Eigen::Index i = 0; i < out.nodal.size(); ++i) {
    const double s = out.nodal[i];
    const double mag = std::pow(std::log1p(std::abs(s)), q);
    out.nodal[i] = s >= 0.0 ? mag : -mag;
  }
  return out;
}

Solution subtract(const Solution& a, const Solution& b) {
  if (a.nodal.size() != b.nodal.size()) throw NormError("subtract: size mismatch");
  Solution out = a;
  out.nodal -= b.nodal;
  return out;
}

double norm(const Mesh& mesh, const Solution& v, NormKind kind, double p) {
  if (v.nodal.size() != mesh.n_vertices()) throw NormError("norm: solution/mesh mismatch");
  const int nv = mesh.dim + 1;
  switch (kind) {
    case NormKind::Linf: {
      double m = 0.0;
      for (Eigen::Index i = 0; i < v.nodal.size(); ++i) m = std::max(m, std::abs(v.nodal[i]));
      return m;
    }
    case NormKind::L1: {
      // Vertex rule: integral of the P1 interpolant of |v|.
      double total = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const double share = mesh.cell_volume(c) / nv;
        for (int i = 0; i < nv; ++i) total += share * std::abs(v.nodal[mesh.cells[c][i]]);
      }
      return total;
    }
    case NormKind::L2: {
      // Exact element mass: int (sum v_i lam_i)^2 with M_ij = V (1+d_ij)/((d+1)(d+2)).
      double total = 0.0;
      const double scale = 1.0 / (nv * (nv + 1));
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < nv; ++i) {
          const double vi = v.nodal[mesh.cells[c][i]];
          sum += vi;
          sq += vi * vi;
        }
        total += vol * scale * (sum * sum + sq);
      }
      return std::sqrt(total);
    }
    case NormKind::H1semi: {
      double total = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const Vec3 g = cell_gradient(mesh, c, v.nodal);
        double g2 = 0.0;
        for (int k = 0; k < mesh.dim; ++k) g2 += g[k] * g[k];
        total += mesh.cell_volume(c) * g2;
      }
      return std::sqrt(total);
    }
    case NormKind::Lp: {
      if (p < 1.0) throw NormError("norm: p must be >= 1");
      double total = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c) {
        cell_quadrature(mesh, c, nullptr, [&](const Point& x, double w) {
          const auto lam = barycentric_in_cell(mesh, c, x);
          double val = 0.0;
          for (int i = 0; i < nv; ++i) val += lam[i] * v.nodal[mesh.cells[c][i]];
          total += w * std::pow(std::abs(val), p);
        });
      }
      return std::pow(total, 1.0 / p);
    }
  }
  throw NormError("norm: unknown kind");
}

double dual_norm_Hm1(const LoadVector& rhs, const SparseOperator& riesz) {
  if (rhs.vec.size() != riesz.mat.rows()) throw NormError("dual_norm_Hm1: size mismatch");
  if (rhs.vec.size() == 0) return 0.0;
  Eigen::SparseMatrix<double> k = riesz.mat;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  chol.compute(k);
  if (chol.info() != Eigen::Success)
    throw SingularMatrixError("dual_norm_Hm1: Riesz map not SPD");
  const Eigen::VectorXd x = chol.solve(rhs.vec);
  return std::sqrt(std::max(0.0, rhs.vec.dot(x)));
}

double superlevel_measure(const Mesh& mesh, const Solution& v, double m) {
  if (!(m > 0.0)) throw NormError("superlevel_measure: m must be > 0");
  const int nv = mesh.dim + 1;
  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    int count = 0;
    for (int i = 0; i < nv; ++i)
      if (std::abs(v.nodal[mesh.cells[c][i]]) > m) ++count;
    total += mesh.cell_volume(c) * count / nv;
  }
  return total;
}

double entropy_residual(const Mesh& mesh, const Solution& u, const CoefficientSet& coeffs,
                        const Solution& phi, double k) {
  if (!(k > 0.0)) throw NormError("entropy_residual: k must be > 0");
  Solution z = truncate(subtract(u, phi), k);
  auto [op, load] = assemble_primal(mesh, coeffs);
  const Eigen::VectorXd ui = interior_part(mesh, u);
  const Eigen::VectorXd zi = interior_part(mesh, z);
  return zi.dot(op.mat * ui - load.vec);
}

double NormReport::get(const std::string& name) const {
  for (const auto& [n, v] : values)
    if (n == name) return v;
  throw NormError("NormReport: no value named " + name);
}

NormReport boccardo_bound_report(const Mesh& mesh, const Solution& u,
                                 const CoefficientSet& coeffs, const SparseOperator& riesz,
                                 double r, const std::vector<double>& t_list) {
  NormReport report;
  report.mesh_tag = mesh.tag;

  auto [op, load] = assemble_primal(mesh, coeffs);
  (void)op;
  const double f_dual = dual_norm_Hm1(load, riesz);
  const double e_l2 = field_Lq_norm(mesh, coeffs.E, 2.0);
  const double e_lr_pow = std::pow(field_Lq_norm(mesh, coeffs.E, r), r);  // int |E|^r

  const double log_h1 = norm(mesh, log_power_compose(u, 1.0), NormKind::H1semi);
  const double denom = f_dual + e_l2;
  const double R = denom > 0.0 ? log_h1 / denom : 0.0;
  report.values.emplace_back("R", R);
  report.values.emplace_back("f_Hm1", f_dual);
  report.values.emplace_back("E_L2", e_l2);
  report.values.emplace_back("E_Lr_pow_r", e_lr_pow);

  for (double t : t_list) {
    const double num = norm(mesh, log_power_compose(u, (t + 2.0) / 2.0), NormKind::H1semi);
    const double den = std::pow(e_lr_pow, (t + 2.0) / r) + f_dual * f_dual;
    const double rt = den > 0.0 ? num * num / den : 0.0;
    report.values.emplace_back("R_t(" + std::to_string(static_cast<int>(t)) + ")", rt);
  }
  return report;
}

}  // namespace driftlab
