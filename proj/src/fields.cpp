#include "driftlab/fields.hpp"

#include <cmath>
#include <random>

namespace driftlab {

ScalarField ScalarField::constant(double v) {
  ScalarField s;
  s.eval_ = [v](const Point&, int) { return v; };
  s.expr_ = Expr::constant(v);
  return s;
}

ScalarField ScalarField::from_expr(Expr e) {
  ScalarField s;
  s.expr_ = e;
  s.eval_ = [e](const Point& x, int) { return e.eval(x); };
  return s;
}

ScalarField ScalarField::cell_table(std::uint64_t mesh_tag, std::vector<double> values) {
  ScalarField s;
  auto table = std::make_shared<std::vector<double>>(std::move(values));
  s.eval_ = [table, mesh_tag](const Point&, int cell) {
    if (cell < 0 || cell >= static_cast<int>(table->size()))
      throw FieldError("cell-table field evaluated without a valid cell index");
    return (*table)[cell];
  };
  return s;
}

ScalarField ScalarField::from_function(std::function<double(const Point&, int)> f) {
  ScalarField s;
  s.eval_ = std::move(f);
  return s;
}

VectorField VectorField::zero() {
  return VectorField(ScalarField::constant(0.0), ScalarField::constant(0.0),
                     ScalarField::constant(0.0));
}

VectorField VectorField::constant(const Vec3& v) {
  return VectorField(ScalarField::constant(v[0]), ScalarField::constant(v[1]),
                     ScalarField::constant(v[2]));
}

VectorField VectorField::from_function(std::function<Vec3(const Point&, int)> f) {
  VectorField v;
  v.fn_ = std::move(f);
  return v;
}

MatrixField MatrixField::identity() {
  Mat3 m{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  return constant(m);
}

MatrixField MatrixField::constant(const Mat3& m) {
  MatrixField f;
  f.constant_ = m;
  return f;
}

MatrixField MatrixField::from_entries(std::array<std::array<ScalarField, 3>, 3> entries) {
  MatrixField f;
  f.entries_ = std::move(entries);
  f.constant_.reset();
  return f;
}

Mat3 MatrixField::operator()(const Point& x, int cell) const {
  if (constant_) return *constant_;
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = entries_[i][j](x, cell);
  return m;
}

void validate_coefficients(const Mesh& mesh, const CoefficientSet& coeffs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = mesh.dim;
  double a_bound = 1e300;

  auto check_point = [&](const Point& x, int cell) {
    const Mat3 A = coeffs.A(x, cell);
    // Canonical directions plus 8 random ones.
    std::vector<Vec3> dirs;
    for (int k = 0; k < dim; ++k) {
      Vec3 e{0.0, 0.0, 0.0};
      e[k] = 1.0;
      dirs.push_back(e);
    }
    for (int k = 0; k < 8; ++k) {
      Vec3 xi{0.0, 0.0, 0.0};
      double nrm = 0.0;
      for (int d = 0; d < dim; ++d) {
        xi[d] = gauss(rng);
        nrm += xi[d] * xi[d];
      }
      nrm = std::sqrt(nrm);
      if (nrm < 1e-12) continue;
      for (int d = 0; d < dim; ++d) xi[d] /= nrm;
      dirs.push_back(xi);
    }
    double a_norm = 0.0;
    for (const auto& xi : dirs) {
      double quad = 0.0;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) quad += A[i][j] * xi[i] * xi[j];
      if (quad < coeffs.alpha * (1.0 - 1e-12))
        throw FieldError("ellipticity violated: A(x) xi.xi < alpha |xi|^2 at a sample point");
    }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a_norm = std::max(a_norm, std::abs(A[i][j]));
    if (!(a_norm < a_bound)) throw FieldError("matrix A unbounded at a sample point");

    const double av = coeffs.a(x, cell);
    if (av < coeffs.gamma - 1e-12)
      throw FieldError("reaction coefficient a(x) below declared gamma at a sample point");
    if (av < -1e-12) throw FieldError("reaction coefficient a(x) negative at a sample point");
  };

  for (int c = 0; c < mesh.n_cells(); ++c)
    cell_quadrature(mesh, c, nullptr, [&](const Point& x, double) { check_point(x, c); });
}

double bump_normalization(double r, int dim) {
  // integral over the unit ball of (1-|y|^2)^(2r):
  //   pi^(dim/2) * Gamma(2r+1) / Gamma(dim/2 + 2r + 1)
  return std::pow(M_PI, dim / 2.0) * std::exp(std::lgamma(2.0 * r + 1.0) -
                                              std::lgamma(dim / 2.0 + 2.0 * r + 1.0));
}

double bump_value(double r, int dim, const Vec3& y) {
  double n2 = 0.0;
  for (int k = 0; k < dim; ++k) n2 += y[k] * y[k];
  const double base = std::max(0.0, 1.0 - n2);
  return base * base / std::pow(bump_normalization(r, dim), 1.0 / r);
}

VectorField make_drift_field(const DriftSequenceSpec& spec, int n) {
  if (n < 1) throw FieldError("make_drift_field: n must be >= 1");
  if (spec.beta < 0.0) throw FieldError("make_drift_field: beta must be >= 0");
  const int dim = spec.dim;
  const double r = spec.exponent_r();
  if (dim == 2 && !(r > 2.0))
    throw FieldError("make_drift_field: exponent r must be > 2 when N = 2");

  switch (spec.kind) {
    case DriftKind::Constant:
      return spec.E0;
    case DriftKind::Oscillatory: {
      const VectorField base = spec.E0;
      const double beta = spec.beta;
      VectorField v = VectorField::from_function([base, beta, n, dim](const Point& x, int cell) {
        Vec3 e = base(x, cell);
        e[0] += beta * std::cos(2.0 * M_PI * n * x[0]);
        e[1] += beta * std::sin(2.0 * M_PI * n * x[0]);
        (void)dim;
        return e;
      });
      QuadHint hint;
      hint.length_scale = 1.0 / (8.0 * n);
      v.set_hint(hint);
      return v;
    }
    case DriftKind::Concentrating: {
      for (int k = 0; k < dim; ++k)
        if (spec.center[k] < spec.box.lo[k] || spec.center[k] > spec.box.hi[k])
          throw FieldError("make_drift_field: concentrating center outside the box");
      const double amp = spec.beta * std::pow(static_cast<double>(n), dim / r);
      const Point x0 = spec.center;
      Vec3 d = spec.direction;
      double dn = 0.0;
      for (int k = 0; k < dim; ++k) dn += d[k] * d[k];
      dn = std::sqrt(dn);
      if (dn < 1e-14) throw FieldError("make_drift_field: zero direction");
      for (int k = 0; k < 3; ++k) d[k] /= dn;
      VectorField v = VectorField::from_function([amp, x0, d, n, dim, r](const Point& x, int) {
        Vec3 y{0.0, 0.0, 0.0};
        for (int k = 0; k < dim; ++k) y[k] = n * (x[k] - x0[k]);
        const double val = amp * bump_value(r, dim, y);
        return Vec3{val * d[0], val * d[1], val * d[2]};
      });
      QuadHint hint;
      hint.length_scale = 1.0 / (8.0 * n);
      hint.has_support = true;
      for (int k = 0; k < 3; ++k) {
        hint.support_lo[k] = x0[k] - 1.0 / n;
        hint.support_hi[k] = x0[k] + 1.0 / n;
      }
      v.set_hint(hint);
      return v;
    }
  }
  throw FieldError("make_drift_field: unknown kind");
}

VectorField drift_limit_field(const DriftSequenceSpec& spec) {
  if (spec.kind == DriftKind::Concentrating) return VectorField::zero();
  return spec.E0;
}

std::vector<EquiIntegrabilityRow> equi_integrability_profile(
    const Mesh& mesh, const DriftSequenceSpec& spec, const std::vector<int>& n_list,
    const std::vector<double>& M_list) {
  if (n_list.empty() || M_list.empty())
    throw FieldError("equi_integrability_profile: empty parameter list");
  for (std::size_t i = 1; i < M_list.size(); ++i)
    if (!(M_list[i] > M_list[i - 1]))
      throw FieldError("equi_integrability_profile: M values must be increasing");

  const double r = spec.exponent_r();
  std::vector<EquiIntegrabilityRow> rows;
  for (int n : n_list) {
    const VectorField En = make_drift_field(spec, n);
    for (double M : M_list) {
      const double theta = integrate(
          mesh,
          [&](const Point& x, int cell) {
            const Vec3 e = En(x, cell);
            double mag = 0.0;
            for (int k = 0; k < mesh.dim; ++k) mag += e[k] * e[k];
            mag = std::sqrt(mag);
            return mag > M ? std::pow(mag, r) : 0.0;
          },
          En.hint());
      rows.push_back({n, M, theta});
    }
  }
  return rows;
}

std::vector<WeakProbeRow> weak_limit_probe(const Mesh& mesh, const DriftSequenceSpec& spec,
                                           const std::vector<int>& n_list,
                                           const std::vector<VectorField>& dictionary) {
  if (dictionary.empty()) throw FieldError("weak_limit_probe: empty dictionary");
  std::vector<WeakProbeRow> rows;
  for (int n : n_list) {
    const VectorField En = make_drift_field(spec, n);
    for (std::size_t j = 0; j < dictionary.size(); ++j) {
      const VectorField& phi = dictionary[j];
      const double pairing = integrate(
          mesh,
          [&](const Point& x, int cell) {
            const Vec3 e = En(x, cell);
            const Vec3 p = phi(x, cell);
            double dot = 0.0;
            for (int k = 0; k < mesh.dim; ++k) dot += e[k] * p[k];
            return dot;
          },
          En.hint());
      rows.push_back({n, j, pairing});
    }
  }
  return rows;
}

double field_Lq_norm(const Mesh& mesh, const VectorField& E, double q) {
  if (q < 1.0) throw FieldError("field_Lq_norm: q must be >= 1");
  const double val = integrate(
      mesh,
      [&](const Point& x, int cell) {
        const Vec3 e = E(x, cell);
        double mag = 0.0;
        for (int k = 0; k < mesh.dim; ++k) mag += e[k] * e[k];
        return std::pow(std::sqrt(mag), q);
      },
      E.hint());
  return std::pow(val, 1.0 / q);
}

}  // namespace driftlab
