#pragma once

#include <string>
#include <vector>

#include "driftlab/solve.hpp"

namespace driftlab {

struct NormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nodal clamp to [-k, k]; the entropy-solution test-function device.
Solution truncate(const Solution& v, double k);

/// Nodal ln^q(1+|v|) sgn(v), treated as a P1 function afterwards.
Solution log_power_compose(const Solution& v, double q);

Solution subtract(const Solution& a, const Solution& b);

enum class NormKind { L1, L2, Linf, H1semi, Lp };

/// P1 interpolant value at a point inside cell c.
double p1_value(const Mesh& mesh, int c, const Eigen::VectorXd& nodal, const Point& x);
/// Constant gradient of the P1 interpolant on cell c.
Vec3 p1_gradient(const Mesh& mesh, int c, const Eigen::VectorXd& nodal);

/// L1/L2/H1semi exact for the P1 interpolant; Lp by the degree-4 rule;
/// Linf as max |nodal|.
double norm(const Mesh& mesh, const Solution& v, NormKind kind, double p = 2.0);

/// Discrete H^-1 norm sqrt(F^T K^{-1} F) with K the Riesz (Laplacian) map.
double dual_norm_Hm1(const LoadVector& rhs, const SparseOperator& riesz);

/// |{ |v| > m }| approximated per cell by the fraction of vertices exceeding m.
double superlevel_measure(const Mesh& mesh, const Solution& v, double m);

/// Signed value of the entropy inequality's left-minus-right side at test
/// function T_k(u - phi); <= 0 up to discretization error for entropy solutions.
double entropy_residual(const Mesh& mesh, const Solution& u, const CoefficientSet& coeffs,
                        const Solution& phi, double k);

struct NormReport {
  std::vector<std::pair<std::string, double>> values;
  std::uint64_t mesh_tag = 0;

  double get(const std::string& name) const;
};

/// Ratio R = |ln(1+|u|)sgn u|_{H1} / (||f||_{H-1} + ||E||_{L2}) and the
/// log-power family R_t for t in t_list, with r the drift integrability
/// exponent (N if N>2, declared p>2 if N=2).
NormReport boccardo_bound_report(const Mesh& mesh, const Solution& u,
                                 const CoefficientSet& coeffs, const SparseOperator& riesz,
                                 double r, const std::vector<double>& t_list = {2.0, 4.0, 6.0});

}  // namespace driftlab
