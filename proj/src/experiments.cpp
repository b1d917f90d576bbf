#include "driftlab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftlab/assembly.hpp"
#include "driftlab/config.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/quadrature.hpp"
#include "driftlab/solve.hpp"

namespace driftlab {

namespace {

constexpr const char* kVersion = "driftlab 0.1.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string field_sig(const ScalarField& f) {
  if (const Expr* e = f.expr()) return e->str();
  return "<rule>";
}

std::string field_sig(const VectorField& f) {
  return field_sig(f.component(0)) + ";" + field_sig(f.component(1)) + ";" +
         field_sig(f.component(2));
}

std::string field_sig(const MatrixField& f) {
  if (const Mat3* m = f.constant_value()) {
    std::string out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out += num((*m)[i][j]) + ";";
    return out;
  }
  return "<entries>";
}

const char* kind_name(DriftKind k) {
  switch (k) {
    case DriftKind::Constant: return "constant";
    case DriftKind::Oscillatory: return "oscillatory";
    case DriftKind::Concentrating: return "concentrating";
  }
  return "?";
}

Mesh make_mesh(const ExperimentConfig& cfg) {
  return build_box_mesh(cfg.dim, cfg.divisions, cfg.box);
}

CoefficientSet base_coeffs(const ExperimentConfig& cfg, VectorField E) {
  CoefficientSet c;
  c.A = cfg.A;
  c.alpha = cfg.alpha;
  c.E = std::move(E);
  c.a = cfg.a;
  c.gamma = cfg.gamma;
  c.f = cfg.f;
  return c;
}

void push(ExperimentReport& rep, const std::string& id, int n, double delta, double h,
          const std::string& metric, double value) {
  rep.rows.push_back({id, n, delta, h, metric, value});
}

/// phi^T K v over interior nodes: the H1_0 pairing of the interpolated
/// dictionary member against v.
double h1_pairing(const Mesh& mesh, const SparseOperator& riesz, const Eigen::VectorXd& phi_int,
                  const Solution& v) {
  return phi_int.dot(riesz.mat * interior_part(mesh, v));
}

Eigen::VectorXd interpolate_interior(const Mesh& mesh, const ScalarField& phi) {
  Eigen::VectorXd out(mesh.n_interior());
  for (int i = 0; i < mesh.n_interior(); ++i)
    out[i] = phi(mesh.vertices[mesh.interior_nodes[i]]);
  return out;
}

}  // namespace

std::uint64_t ExperimentConfig::hash() const {
  std::ostringstream s;
  s << id << "|" << dim << "|" << divisions[0] << "," << divisions[1] << "," << divisions[2]
    << "|";
  for (int k = 0; k < 3; ++k) s << num(box.lo[k]) << "," << num(box.hi[k]) << ",";
  s << "|" << field_sig(A) << "|" << num(alpha) << "|" << field_sig(a) << "|" << num(gamma)
    << "|" << field_sig(f) << "|" << kind_name(drift.kind) << "|" << field_sig(drift.E0) << "|"
    << num(drift.beta) << "|" << num(drift.r) << "|";
  for (int k = 0; k < 3; ++k) s << num(drift.center[k]) << "," << num(drift.direction[k]) << ",";
  s << "|";
  for (int n : n_list) s << n << ",";
  s << "|";
  for (double m : m_list) s << num(m) << ",";
  s << "|";
  for (double q : q_list) s << num(q) << ",";
  s << "|";
  for (double d : delta_list) s << num(d) << ",";
  s << "|" << mms_levels << "|" << seed;
  return fnv1a(s.str());
}

ExperimentConfig default_oscillatory_config() {
  ExperimentConfig cfg;
  cfg.id = "homogenize-oscillatory";
  cfg.dim = 2;
  cfg.divisions = {16, 16, 0};
  cfg.f = ScalarField::constant(60.0);
  cfg.drift.kind = DriftKind::Oscillatory;
  cfg.drift.dim = 2;
  cfg.drift.E0 = VectorField::constant({0.5, 0.25, 0.0});
  cfg.drift.beta = 1.0;
  cfg.drift.r = 4.0;
  return cfg;
}

ExperimentConfig default_concentrating_config() {
  ExperimentConfig cfg;
  cfg.id = "homogenize-concentrating";
  cfg.dim = 3;
  cfg.divisions = {8, 8, 8};
  cfg.f = ScalarField::constant(20.0);
  cfg.drift.kind = DriftKind::Concentrating;
  cfg.drift.dim = 3;
  cfg.drift.beta = 1.0;
  cfg.drift.center = {0.5, 0.5, 0.5};
  cfg.drift.direction = {1.0, 0.0, 0.0};
  return cfg;
}

ExperimentConfig default_delta_sweep_config() {
  ExperimentConfig cfg = default_concentrating_config();
  cfg.id = "delta-sweep";
  cfg.n_list = {1, 4, 16};
  return cfg;
}

ExperimentConfig default_l1_config(double gamma) {
  ExperimentConfig cfg;
  cfg.id = "l1-check";
  cfg.dim = 2;
  cfg.divisions = {16, 16, 0};
  cfg.a = ScalarField::constant(gamma);
  cfg.gamma = gamma;
  cfg.f = ScalarField::constant(1.0);
  cfg.drift.kind = DriftKind::Constant;
  cfg.drift.dim = 2;
  cfg.drift.E0 = VectorField::constant({0.5, 0.25, 0.0});
  cfg.n_list = {1};
  return cfg;
}

ExperimentConfig default_mms_config(int dim) {
  ExperimentConfig cfg;
  cfg.id = "mms";
  cfg.dim = dim;
  cfg.divisions = dim == 2 ? std::array<int, 3>{8, 8, 0} : std::array<int, 3>{4, 4, 4};
  cfg.mms_levels = dim == 2 ? 4 : 3;
  cfg.drift.kind = DriftKind::Constant;
  cfg.drift.dim = dim;
  cfg.drift.E0 = VectorField::constant({1.0, 0.0, 0.0});
  cfg.n_list = {1};
  return cfg;
}

ExperimentConfig default_maxprinciple_config() {
  ExperimentConfig cfg;
  cfg.id = "maxprinciple";
  cfg.dim = 2;
  cfg.divisions = {16, 16, 0};
  cfg.f = ScalarField::constant(1.0);
  cfg.drift.kind = DriftKind::Constant;
  cfg.drift.dim = 2;
  cfg.drift.E0 = VectorField::constant({0.5, 0.25, 0.0});
  cfg.n_list = {1};
  return cfg;
}

double ExperimentReport::get(const std::string& metric, int n) const {
  for (const auto& r : rows)
    if (r.metric == metric && r.n == n) return r.value;
  throw ExperimentError("report row not found: " + metric + " n=" + std::to_string(n));
}

bool ExperimentReport::has(const std::string& metric, int n) const {
  for (const auto& r : rows)
    if (r.metric == metric && r.n == n) return true;
  return false;
}

std::vector<ScalarField> probe_dictionary(int dim) {
  std::vector<ScalarField> dict;
  const int freq[6][3] = {{1, 1, 1}, {2, 1, 1}, {1, 2, 1}, {2, 2, 1}, {3, 1, 2}, {1, 3, 2}};
  for (const auto& fr : freq) {
    std::string text = "sin(" + std::to_string(fr[0]) + "*pi*x1)*sin(" + std::to_string(fr[1]) +
                       "*pi*x2)";
    if (dim == 3) text += "*sin(" + std::to_string(fr[2]) + "*pi*x3)";
    dict.push_back(ScalarField::from_expr(parse_expr(text)));
  }
  return dict;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) throw ExperimentError("fit_order: need >= 2 points");
  double mh = 0.0, me = 0.0;
  const double n = static_cast<double>(h.size());
  std::vector<double> lh(h.size()), le(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0)) throw ExperimentError("fit_order: nonpositive data");
    lh[i] = std::log(h[i]);
    le[i] = std::log(err[i]);
    mh += lh[i];
    me += le[i];
  }
  mh /= n;
  me /= n;
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    cov += (lh[i] - mh) * (le[i] - me);
    var += (lh[i] - mh) * (lh[i] - mh);
  }
  return cov / var;
}

ExperimentReport run_homogenization(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) throw ExperimentError("homogenization: empty n_list");
  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const Mesh mesh = make_mesh(cfg);
  const double h = mesh.h;
  const SparseOperator riesz = assemble_riesz(mesh);
  const double r = cfg.drift.exponent_r();

  const CoefficientSet limit = base_coeffs(cfg, drift_limit_field(cfg.drift));
  Solution u0;
  try {
    u0 = solve_primal(mesh, limit).solution;
  } catch (const SolveError&) {
    push(rep, cfg.id, 0, 0.0, h, "failed", 1.0);
    return rep;
  }

  const auto dict = probe_dictionary(cfg.dim);
  std::vector<Eigen::VectorXd> dict_int;
  dict_int.reserve(dict.size());
  for (const auto& phi : dict) dict_int.push_back(interpolate_interior(mesh, phi));

  push(rep, cfg.id, 0, 0.0, h, "u0_L2", norm(mesh, u0, NormKind::L2));
  push(rep, cfg.id, 0, 0.0, h, "u0_H1semi", norm(mesh, u0, NormKind::H1semi));

  for (int n : cfg.n_list) {
    CoefficientSet cn = base_coeffs(cfg, make_drift_field(cfg.drift, n));
    Solution un;
    try {
      un = solve_primal(mesh, cn).solution;
    } catch (const SolveError&) {
      push(rep, cfg.id, n, 0.0, h, "failed", 1.0);
      continue;
    }
    push(rep, cfg.id, n, 0.0, h, "u_L2", norm(mesh, un, NormKind::L2));
    push(rep, cfg.id, n, 0.0, h, "u_H1semi", norm(mesh, un, NormKind::H1semi));
    push(rep, cfg.id, n, 0.0, h, "full_L2_diff", norm(mesh, subtract(un, u0), NormKind::L2));
    for (double m : cfg.m_list) {
      const Solution d = subtract(truncate(un, m), truncate(u0, m));
      push(rep, cfg.id, n, 0.0, h, "Tm" + short_num(m) + "_L2_diff", norm(mesh, d, NormKind::L2));
      push(rep, cfg.id, n, 0.0, h, "Tm" + short_num(m) + "_H1_diff",
           norm(mesh, d, NormKind::H1semi));
    }
    for (double q : cfg.q_list) {
      const Solution d = subtract(log_power_compose(un, q), log_power_compose(u0, q));
      push(rep, cfg.id, n, 0.0, h, "logq" + short_num(q) + "_L2_diff",
           norm(mesh, d, NormKind::L2));
    }
    const NormReport bb = boccardo_bound_report(mesh, un, cn, riesz, r);
    push(rep, cfg.id, n, 0.0, h, "R", bb.get("R"));
    push(rep, cfg.id, n, 0.0, h, "R_t(2)", bb.get("R_t(2)"));
    push(rep, cfg.id, n, 0.0, h, "R_t(4)", bb.get("R_t(4)"));
    push(rep, cfg.id, n, 0.0, h, "R_t(6)", bb.get("R_t(6)"));
    for (double m : cfg.m_list)
      push(rep, cfg.id, n, 0.0, h, "superlevel" + short_num(m),
           superlevel_measure(mesh, un, m));
    // Weak-convergence surrogate: gap of the H1_0 pairing against each
    // dictionary member, truncation at the largest m.
    const double m = cfg.m_list.back();
    const Solution tn = truncate(un, m);
    const Solution t0 = truncate(u0, m);
    for (std::size_t j = 0; j < dict.size(); ++j) {
      const double gap = std::abs(h1_pairing(mesh, riesz, dict_int[j], tn) -
                                  h1_pairing(mesh, riesz, dict_int[j], t0));
      push(rep, cfg.id, n, 0.0, h, "weakgap_d" + std::to_string(j), gap);
    }
  }
  return rep;
}

ExperimentReport run_delta_sweep(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty() || cfg.delta_list.empty())
    throw ExperimentError("delta sweep: empty grid");
  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const Mesh mesh = make_mesh(cfg);
  const double h = mesh.h;
  const int N = cfg.dim;
  const SparseOperator riesz = assemble_riesz(mesh);

  for (int n : cfg.n_list) {
    CoefficientSet cn = base_coeffs(cfg, make_drift_field(cfg.drift, n));
    Solution un;
    try {
      un = solve_primal(mesh, cn).solution;
    } catch (const SolveError&) {
      push(rep, cfg.id, n, 0.0, h, "failed", 1.0);
      continue;
    }
    const double E_LN_pow = std::pow(field_Lq_norm(mesh, cn.E, N), N);
    const auto [op, load] = assemble_primal(mesh, cn);
    const double f_Hm1 = dual_norm_Hm1(load, riesz);
    for (double delta : cfg.delta_list) {
      RegularizedReport rr;
      try {
        rr = solve_regularized(mesh, cn, delta);
      } catch (const SolveError&) {
        push(rep, cfg.id, n, delta, h, "failed", 1.0);
        continue;
      }
      const Solution& w = rr.solution;
      push(rep, cfg.id, n, delta, h, "w_minus_u_L2", norm(mesh, subtract(w, un), NormKind::L2));
      const double grad2 = std::pow(norm(mesh, w, NormKind::H1semi), 2.0);
      const double pexp = 2.0 * N / (N - 2.0);
      const double wp = std::pow(norm(mesh, w, NormKind::Lp, pexp), pexp);
      const double lhs = 0.5 * cfg.alpha * grad2 + (N + 2.0) / (2.0 * N) * delta * wp;
      const double rhs = std::pow(2.0, N / 2.0) /
                             (N * std::pow(cfg.alpha, N / 2.0) * std::pow(delta, (N - 2.0) / 2.0)) *
                             E_LN_pow +
                         f_Hm1 * f_Hm1 / cfg.alpha;
      push(rep, cfg.id, n, delta, h, "estwnd_lhs", lhs);
      push(rep, cfg.id, n, delta, h, "estwnd_rhs", rhs);
      push(rep, cfg.id, n, delta, h, "newton_steps", static_cast<double>(rr.newton_steps));
    }
  }
  return rep;
}

ExperimentReport run_l1_check(const ExperimentConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw ExperimentError("l1 check requires gamma > 0");
  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const Mesh mesh = make_mesh(cfg);
  const double h = mesh.h;
  CoefficientSet coeffs = base_coeffs(cfg, drift_limit_field(cfg.drift));
  const Solution u = solve_primal(mesh, coeffs).solution;
  const double u_L1 = norm(mesh, u, NormKind::L1);
  const double f_L1 =
      integrate(mesh, [&](const Point& x, int c) { return std::abs(coeffs.f(x, c)); },
                coeffs.f.hint());
  const double bound = f_L1 / cfg.gamma;
  push(rep, cfg.id, 0, 0.0, h, "u_L1", u_L1);
  push(rep, cfg.id, 0, 0.0, h, "f_L1", f_L1);
  push(rep, cfg.id, 0, 0.0, h, "bound", bound);
  push(rep, cfg.id, 0, 0.0, h, "violated", (u_L1 > 1.02 * bound) ? 1.0 : 0.0);
  return rep;
}

ExperimentReport run_mms_convergence(const ExperimentConfig& cfg) {
  if (cfg.mms_levels < 1) throw ExperimentError("mms: need >= 1 level");
  const Mat3* Aconst = cfg.A.constant_value();
  if (!Aconst) throw ExperimentError("mms: requires a constant matrix A");
  const Expr* a_expr = cfg.a.expr();
  if (!a_expr) throw ExperimentError("mms: requires an expression-backed a");

  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const int dim = cfg.dim;
  const VectorField E = drift_limit_field(cfg.drift);
  std::array<Expr, 3> E_expr;
  for (int i = 0; i < dim; ++i) {
    const Expr* e = E.component(i).expr();
    if (!e) throw ExperimentError("mms: requires expression-backed drift components");
    E_expr[i] = *e;
  }

  // Manufactured solution and symbolically derived source:
  //   f = -sum_ij A_ij d_i d_j u* - E.grad u* - (div E) u* + a u*.
  Expr ustar = parse_expr(dim == 2 ? "sin(pi*x1)*sin(pi*x2)"
                                   : "sin(pi*x1)*sin(pi*x2)*sin(pi*x3)");
  Expr f = *a_expr * ustar;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j)
      f = f - Expr::constant((*Aconst)[i][j]) * ustar.diff(i).diff(j);
    f = f - E_expr[i] * ustar.diff(i) - E_expr[i].diff(i) * ustar;
  }

  Mesh mesh = make_mesh(cfg);
  std::vector<double> hs, l2s, h1s;
  for (int level = 1; level <= cfg.mms_levels; ++level) {
    CoefficientSet coeffs = base_coeffs(cfg, E);
    coeffs.f = ScalarField::from_expr(f);
    const Solution u = solve_primal(mesh, coeffs).solution;
    double l2 = 0.0, h1 = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Vec3 g = p1_gradient(mesh, c, u.nodal);
      cell_quadrature(mesh, c, nullptr, [&](const Point& x, double w) {
        const double diff = p1_value(mesh, c, u.nodal, x) - ustar.eval(x);
        l2 += w * diff * diff;
        double g2 = 0.0;
        for (int k = 0; k < dim; ++k) {
          const double gd = g[k] - ustar.diff(k).eval(x);
          g2 += gd * gd;
        }
        h1 += w * g2;
      });
    }
    l2 = std::sqrt(l2);
    h1 = std::sqrt(h1);
    push(rep, cfg.id, level, 0.0, mesh.h, "L2_error", l2);
    push(rep, cfg.id, level, 0.0, mesh.h, "H1_error", h1);
    hs.push_back(mesh.h);
    l2s.push_back(l2);
    h1s.push_back(h1);
    if (level < cfg.mms_levels) mesh = refine(mesh);
  }
  if (cfg.mms_levels >= 2) {
    push(rep, cfg.id, 0, 0.0, 0.0, "L2_order", fit_order(hs, l2s));
    push(rep, cfg.id, 0, 0.0, 0.0, "H1_order", fit_order(hs, h1s));
  }
  return rep;
}

ExperimentReport max_principle_probe(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const Mesh mesh = make_mesh(cfg);
  const CoefficientSet coeffs = base_coeffs(cfg, drift_limit_field(cfg.drift));
  const SolveReport sr = solve_adjoint(mesh, coeffs);
  const double mn = sr.solution.nodal.minCoeff();
  push(rep, cfg.id, 0, 0.0, mesh.h, "min_nodal", mn);
  push(rep, cfg.id, 0, 0.0, mesh.h, "peclet", sr.peclet);
  push(rep, cfg.id, 0, 0.0, mesh.h, "pass",
       (sr.peclet > 1.0 || mn >= -1e-8) ? 1.0 : 0.0);
  return rep;
}

std::string render_report(const ExperimentReport& report) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(report.config_hash));
  out << "# config=" << buf << "\n# version=" << kVersion << "\n";
  out << "experiment,n,delta,h,metric,value\n";
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.17e", r.delta);
    out << r.experiment << ',' << r.n << ',' << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17e", r.h);
    out << buf << ',' << r.metric << ',';
    std::snprintf(buf, sizeof(buf), "%.17e", r.value);
    out << buf << '\n';
  }
  return out.str();
}

void write_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExperimentError("cannot open report file: " + path);
  out << render_report(report);
  if (!out) throw ExperimentError("write failed: " + path);
}

}  // namespace driftlab
