#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/expr.hpp"
#include "driftlab/mesh.hpp"
#include "driftlab/quadrature.hpp"

namespace driftlab {

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scalar coefficient: closed-form expression, per-cell constant table, or
/// an arbitrary evaluation rule. Immutable and reentrant.
class ScalarField {
 public:
  ScalarField()
      : eval_([](const Point&, int) { return 0.0; }), expr_(Expr::constant(0.0)) {}

  static ScalarField constant(double v);
  static ScalarField from_expr(Expr e);
  static ScalarField cell_table(std::uint64_t mesh_tag, std::vector<double> values);
  static ScalarField from_function(std::function<double(const Point&, int)> f);

  double operator()(const Point& x, int cell = -1) const { return eval_(x, cell); }
  /// Backing expression if the field is expression-based, else nullptr.
  const Expr* expr() const { return expr_ ? &*expr_ : nullptr; }

  const QuadHint* hint() const { return hint_ ? &*hint_ : nullptr; }
  void set_hint(QuadHint h) { hint_ = h; }

 private:
  std::function<double(const Point&, int)> eval_;
  std::optional<Expr> expr_;
  std::optional<QuadHint> hint_;
};

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

class VectorField {
 public:
  VectorField() = default;
  VectorField(ScalarField c0, ScalarField c1, ScalarField c2 = ScalarField::constant(0.0))
      : comps_{std::move(c0), std::move(c1), std::move(c2)} {}

  static VectorField zero();
  static VectorField constant(const Vec3& v);
  static VectorField from_function(std::function<Vec3(const Point&, int)> f);

  Vec3 operator()(const Point& x, int cell = -1) const {
    if (fn_) return fn_(x, cell);
    return {comps_[0](x, cell), comps_[1](x, cell), comps_[2](x, cell)};
  }
  const ScalarField& component(int i) const { return comps_[i]; }

  const QuadHint* hint() const { return hint_ ? &*hint_ : nullptr; }
  void set_hint(QuadHint h) { hint_ = h; }

 private:
  std::array<ScalarField, 3> comps_;
  std::function<Vec3(const Point&, int)> fn_;
  std::optional<QuadHint> hint_;
};

class MatrixField {
 public:
  MatrixField() : constant_(Mat3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}) {}

  static MatrixField identity();
  static MatrixField constant(const Mat3& m);
  static MatrixField from_entries(std::array<std::array<ScalarField, 3>, 3> entries);

  Mat3 operator()(const Point& x, int cell = -1) const;
  bool is_constant() const { return constant_.has_value(); }
  const Mat3* constant_value() const { return constant_ ? &*constant_ : nullptr; }

 private:
  std::optional<Mat3> constant_;
  std::array<std::array<ScalarField, 3>, 3> entries_;
};

/// The data (A, alpha, E, a, gamma, f) of the drift problem.
struct CoefficientSet {
  MatrixField A;
  double alpha = 1.0;
  VectorField E;
  ScalarField a;
  double gamma = 0.0;  // declared lower bound of a (0 if none)
  ScalarField f;
};

/// Sampled verification of ellipticity, a >= gamma and boundedness of A.
/// Throws FieldError on violation.
void validate_coefficients(const Mesh& mesh, const CoefficientSet& coeffs,
                           std::uint64_t seed = 2024);

enum class DriftKind { Constant, Oscillatory, Concentrating };

/// Recipe for the drift sequence E_n. Oscillatory adds a mean-zero
/// oscillation of frequency n to E0; concentrating is a bump of width 1/n
/// scaled so the L^r norm is constant in n; constant ignores n.
struct DriftSequenceSpec {
  DriftKind kind = DriftKind::Constant;
  int dim = 2;
  VectorField E0;
  double beta = 1.0;        // amplitude of the varying part
  Point center{0.5, 0.5, 0.5};
  Vec3 direction{1.0, 0.0, 0.0};
  double r = 0.0;           // integrability exponent; default N if N>2, must be >2 if N=2
  Box box;                  // domain, used to reject off-domain centers

  double exponent_r() const { return r > 0.0 ? r : static_cast<double>(dim); }
};

VectorField make_drift_field(const DriftSequenceSpec& spec, int n);
/// Weak limit of the sequence: E0 for constant/oscillatory, 0 for concentrating.
VectorField drift_limit_field(const DriftSequenceSpec& spec);

/// Normalized bump profile: psi(y) = max(0, 1-|y|^2)^2 scaled so that the
/// integral of |psi|^r over R^dim equals 1.
double bump_value(double r, int dim, const Vec3& y);
double bump_normalization(double r, int dim);

struct EquiIntegrabilityRow {
  int n;
  double M;
  double theta;  // integral of |E_n|^r over {|E_n| > M}
};

std::vector<EquiIntegrabilityRow> equi_integrability_profile(
    const Mesh& mesh, const DriftSequenceSpec& spec, const std::vector<int>& n_list,
    const std::vector<double>& M_list);

struct WeakProbeRow {
  int n;
  std::size_t dict_index;
  double pairing;  // integral of E_n . phi_j
};

std::vector<WeakProbeRow> weak_limit_probe(const Mesh& mesh, const DriftSequenceSpec& spec,
                                           const std::vector<int>& n_list,
                                           const std::vector<VectorField>& dictionary);

/// L^q norm of |E| over the mesh, using the field's resolution hint.
double field_Lq_norm(const Mesh& mesh, const VectorField& E, double q);

}  // namespace driftlab
