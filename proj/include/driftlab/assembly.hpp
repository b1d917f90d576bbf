#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>

#include "driftlab/fields.hpp"
#include "driftlab/mesh.hpp"

namespace driftlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete operator over interior nodes (Dirichlet rows/columns eliminated).
struct SparseOperator {
  SparseMatrix mat;
  std::uint64_t mesh_tag = 0;
};

struct LoadVector {
  Eigen::VectorXd vec;
  std::uint64_t mesh_tag = 0;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyOptions {
  /// Isotropic artificial diffusion for drift-dominated runs. Off by
  /// default; all acceptance runs use plain Galerkin.
  bool artificial_diffusion = false;
};

/// Galerkin matrix/load of  A u = -div(A grad u + E u) + a u = f  on P1 hats:
/// entry (i,j) = int A grad(phi_j).grad(phi_i) + phi_j E.grad(phi_i) + a phi_j phi_i.
std::pair<SparseOperator, LoadVector> assemble_primal(const Mesh& mesh,
                                                      const CoefficientSet& coeffs,
                                                      const AssemblyOptions& opts = {});

/// Adjoint form: int A^T grad(phi_j).grad(phi_i) + (E.grad phi_j) phi_i + a phi_j phi_i.
/// Exact transpose of the primal matrix by construction.
std::pair<SparseOperator, LoadVector> assemble_adjoint(const Mesh& mesh,
                                                       const CoefficientSet& coeffs,
                                                       const AssemblyOptions& opts = {});

/// Dirichlet Laplacian stiffness: the discrete H^1_0 Riesz map.
SparseOperator assemble_riesz(const Mesh& mesh);

/// Consistent mass matrix over interior nodes.
SparseOperator assemble_mass(const Mesh& mesh);

/// Lumped mass diagonal over interior nodes.
Eigen::VectorXd lumped_mass(const Mesh& mesh);

/// Zero-order regularization delta*|s|^(4/(N-2))*s (|s|^2 s when N=2),
/// mass-lumped. Returns the residual contribution delta*M_L*g(w) and the
/// diagonal of the Jacobian delta*M_L*g'(w). Throws on overflow of g.
std::pair<Eigen::VectorXd, Eigen::VectorXd> assemble_nonlinear_term(
    const Mesh& mesh, const Eigen::VectorXd& w_interior, double delta);

double regularization_g(int dim, double s);
double regularization_g_prime(int dim, double s);

/// Max over cells of |E(barycenter)| h_T / (2 alpha).
double mesh_peclet(const Mesh& mesh, const CoefficientSet& coeffs);

/// Coordinate text dump `i j value` (0-based), sorted by (i, j).
void dump_matrix(const SparseOperator& op, std::ostream& out);

}  // namespace driftlab
