#include "driftlab/assembly.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace driftlab {

namespace {

struct ElementGeometry {
  std::array<Vec3, 4> grad;  // gradients of the P1 basis functions
  double volume;
};

ElementGeometry element_geometry(const Mesh& mesh, int c) {
  ElementGeometry g;
  const int dim = mesh.dim;
  const auto& cell = mesh.cells[c];
  const Point& x0 = mesh.vertices[cell[0]];
  // D columns are edge vectors from vertex 0; grad(lambda_j) rows of D^{-T}.
  double D[3][3] = {};
  for (int j = 1; j <= dim; ++j)
    for (int k = 0; k < dim; ++k) D[k][j - 1] = mesh.vertices[cell[j]][k] - x0[k];

  double inv[3][3] = {};
  double det = 0.0;
  if (dim == 2) {
    det = D[0][0] * D[1][1] - D[0][1] * D[1][0];
    inv[0][0] = D[1][1] / det;
    inv[0][1] = -D[0][1] / det;
    inv[1][0] = -D[1][0] / det;
    inv[1][1] = D[0][0] / det;
    g.volume = std::abs(det) / 2.0;
  } else {
    det = D[0][0] * (D[1][1] * D[2][2] - D[1][2] * D[2][1]) -
          D[0][1] * (D[1][0] * D[2][2] - D[1][2] * D[2][0]) +
          D[0][2] * (D[1][0] * D[2][1] - D[1][1] * D[2][0]);
    const double id = 1.0 / det;
    inv[0][0] = (D[1][1] * D[2][2] - D[1][2] * D[2][1]) * id;
    inv[0][1] = (D[0][2] * D[2][1] - D[0][1] * D[2][2]) * id;
    inv[0][2] = (D[0][1] * D[1][2] - D[0][2] * D[1][1]) * id;
    inv[1][0] = (D[1][2] * D[2][0] - D[1][0] * D[2][2]) * id;
    inv[1][1] = (D[0][0] * D[2][2] - D[0][2] * D[2][0]) * id;
    inv[1][2] = (D[0][2] * D[1][0] - D[0][0] * D[1][2]) * id;
    inv[2][0] = (D[1][0] * D[2][1] - D[1][1] * D[2][0]) * id;
    inv[2][1] = (D[0][1] * D[2][0] - D[0][0] * D[2][1]) * id;
    inv[2][2] = (D[0][0] * D[1][1] - D[0][1] * D[1][0]) * id;
    g.volume = std::abs(det) / 6.0;
  }
  // grad(lambda_j) for j >= 1 is row j-1 of D^{-1}; grad(lambda_0) = -sum.
  for (int j = 1; j <= dim; ++j) {
    Vec3 gr{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) gr[k] = inv[j - 1][k];
    g.grad[j] = gr;
  }
  Vec3 g0{0.0, 0.0, 0.0};
  for (int j = 1; j <= dim; ++j)
    for (int k = 0; k < dim; ++k) g0[k] -= g.grad[j][k];
  g.grad[0] = g0;
  return g;
}

/// Barycentric coordinates of x within cell c. Assumes x lies in the cell.
std::array<double, 4> barycentric(const Mesh& mesh, const ElementGeometry& g, int c,
                                  const Point& x) {
  const auto& cell = mesh.cells[c];
  const Point& x0 = mesh.vertices[cell[0]];
  std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
  double sum = 0.0;
  for (int j = 1; j <= mesh.dim; ++j) {
    double v = 0.0;
    for (int k = 0; k < mesh.dim; ++k) v += g.grad[j][k] * (x[k] - x0[k]);
    lam[j] = v;
    sum += v;
  }
  lam[0] = 1.0 - sum;
  return lam;
}

// Deterministic COO accumulation keyed by (row, col).
using CooMap = std::map<std::pair<int, int>, double>;

SparseOperator finalize(const Mesh& mesh, CooMap& coo) {
  // Keep an entry when it or its mirror is nonzero: no spurious stored zeros
  // while the sparsity pattern stays symmetric.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(coo.size());
  for (const auto& [key, value] : coo) {
    const auto mirror = coo.find({key.second, key.first});
    const double mv = mirror == coo.end() ? 0.0 : mirror->second;
    if (value != 0.0 || mv != 0.0) trips.emplace_back(key.first, key.second, value);
  }
  SparseOperator op;
  op.mesh_tag = mesh.tag;
  op.mat.resize(mesh.n_interior(), mesh.n_interior());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  return op;
}

enum class Form { Primal, Adjoint };

std::pair<SparseOperator, LoadVector> assemble(const Mesh& mesh, const CoefficientSet& coeffs,
                                               const AssemblyOptions& opts, Form form) {
  const int dim = mesh.dim;
  const int nv = dim + 1;
  CooMap coo;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.n_interior());

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const ElementGeometry g = element_geometry(mesh, c);
    const auto& cell = mesh.cells[c];

    // Mean of A over the cell (and its quadratic form pieces).
    Mat3 Abar{};
    double mass[4][4] = {};
    Vec3 drift_moment[4] = {};  // m_j = int_T lambda_j E dx
    double load_local[4] = {};

    cell_quadrature(mesh, c, nullptr, [&](const Point& x, double w) {
      const Mat3 A = coeffs.A(x, c);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) Abar[i][j] += w * A[i][j];
      const auto lam = barycentric(mesh, g, c, x);
      const double av = coeffs.a(x, c);
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) mass[i][j] += w * av * lam[i] * lam[j];
    });

    const QuadHint* fh = coeffs.f.hint();
    cell_quadrature(mesh, c, fh, [&](const Point& x, double w) {
      const auto lam = barycentric(mesh, g, c, x);
      const double fv = coeffs.f(x, c);
      for (int i = 0; i < nv; ++i) load_local[i] += w * fv * lam[i];
    });

    cell_quadrature(mesh, c, coeffs.E.hint(), [&](const Point& x, double w) {
      const auto lam = barycentric(mesh, g, c, x);
      const Vec3 e = coeffs.E(x, c);
      for (int j = 0; j < nv; ++j)
        for (int k = 0; k < dim; ++k) drift_moment[j][k] += w * lam[j] * e[k];
    });

    if (opts.artificial_diffusion) {
      const Vec3 eb = coeffs.E(mesh.cell_barycenter(c), c);
      double emag = 0.0;
      for (int k = 0; k < dim; ++k) emag += eb[k] * eb[k];
      emag = std::sqrt(emag);
      const double tau = std::max(0.0, 0.5 * emag * mesh.cell_diameter(c) - coeffs.alpha);
      for (int k = 0; k < dim; ++k) Abar[k][k] += tau * g.volume;
    }

    for (int i = 0; i < nv; ++i) {
      const int gi = mesh.interior_index[cell[i]];
      if (gi < 0) continue;
      load[gi] += load_local[i];
      for (int j = 0; j < nv; ++j) {
        const int gj = mesh.interior_index[cell[j]];
        if (gj < 0) continue;
        // Stiffness: (Abar grad(phi_j)) . grad(phi_i), Abar already integrated.
        double stiff = 0.0;
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q) stiff += Abar[p][q] * g.grad[j][q] * g.grad[i][p];
        double drift = 0.0;
        if (form == Form::Primal) {
          for (int k = 0; k < dim; ++k) drift += drift_moment[j][k] * g.grad[i][k];
        } else {
          // int (E . grad phi_j) phi_i, same moments transposed; stiffness
          // uses A^T.
          stiff = 0.0;
          for (int p = 0; p < dim; ++p)
            for (int q = 0; q < dim; ++q) stiff += Abar[q][p] * g.grad[j][q] * g.grad[i][p];
          for (int k = 0; k < dim; ++k) drift += drift_moment[i][k] * g.grad[j][k];
        }
        coo[{gi, gj}] += stiff + drift + mass[i][j];
      }
    }
  }

  SparseOperator op = finalize(mesh, coo);
  LoadVector lv{std::move(load), mesh.tag};
  return {std::move(op), std::move(lv)};
}

}  // namespace

std::pair<SparseOperator, LoadVector> assemble_primal(const Mesh& mesh,
                                                      const CoefficientSet& coeffs,
                                                      const AssemblyOptions& opts) {
  return assemble(mesh, coeffs, opts, Form::Primal);
}

std::pair<SparseOperator, LoadVector> assemble_adjoint(const Mesh& mesh,
                                                       const CoefficientSet& coeffs,
                                                       const AssemblyOptions& opts) {
  return assemble(mesh, coeffs, opts, Form::Adjoint);
}

SparseOperator assemble_riesz(const Mesh& mesh) {
  CoefficientSet laplace;
  laplace.A = MatrixField::identity();
  laplace.E = VectorField::zero();
  laplace.a = ScalarField::constant(0.0);
  laplace.f = ScalarField::constant(0.0);
  return assemble_primal(mesh, laplace).first;
}

SparseOperator assemble_mass(const Mesh& mesh) {
  CoefficientSet m;
  m.A = MatrixField::constant(Mat3{});  // zero matrix
  m.alpha = 0.0;
  m.E = VectorField::zero();
  m.a = ScalarField::constant(1.0);
  m.f = ScalarField::constant(0.0);
  return assemble_primal(mesh, m).first;
}

Eigen::VectorXd lumped_mass(const Mesh& mesh) {
  Eigen::VectorXd ml = Eigen::VectorXd::Zero(mesh.n_interior());
  const int nv = mesh.dim + 1;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double share = mesh.cell_volume(c) / nv;
    for (int i = 0; i < nv; ++i) {
      const int gi = mesh.interior_index[mesh.cells[c][i]];
      if (gi >= 0) ml[gi] += share;
    }
  }
  return ml;
}

double regularization_g(int dim, double s) {
  const double expo = dim > 2 ? 4.0 / (dim - 2) : 2.0;
  return std::pow(std::abs(s), expo) * s;
}

double regularization_g_prime(int dim, double s) {
  const double expo = dim > 2 ? 4.0 / (dim - 2) : 2.0;
  return (1.0 + expo) * std::pow(std::abs(s), expo);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_nonlinear_term(
    const Mesh& mesh, const Eigen::VectorXd& w_interior, double delta) {
  if (w_interior.size() != mesh.n_interior())
    throw AssemblyError("assemble_nonlinear_term: vector/mesh size mismatch");
  const Eigen::VectorXd ml = lumped_mass(mesh);
  Eigen::VectorXd residual(w_interior.size()), jacobian(w_interior.size());
  for (Eigen::Index i = 0; i < w_interior.size(); ++i) {
    const double gv = regularization_g(mesh.dim, w_interior[i]);
    const double gp = regularization_g_prime(mesh.dim, w_interior[i]);
    if (!std::isfinite(gv) || !std::isfinite(gp))
      throw AssemblyError("nonlinear-overflow: g(w) not finite; Newton damping needed");
    residual[i] = delta * ml[i] * gv;
    jacobian[i] = delta * ml[i] * gp;
  }
  return {std::move(residual), std::move(jacobian)};
}

double mesh_peclet(const Mesh& mesh, const CoefficientSet& coeffs) {
  double pe = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Vec3 e = coeffs.E(mesh.cell_barycenter(c), c);
    double mag = 0.0;
    for (int k = 0; k < mesh.dim; ++k) mag += e[k] * e[k];
    pe = std::max(pe, std::sqrt(mag) * mesh.cell_diameter(c) / (2.0 * coeffs.alpha));
  }
  return pe;
}

void dump_matrix(const SparseOperator& op, std::ostream& out) {
  for (int i = 0; i < op.mat.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(op.mat, i); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace driftlab
