#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "driftlab/config.hpp"
#include "driftlab/control.hpp"
#include "driftlab/experiments.hpp"
#include "driftlab/norms.hpp"
#include "driftlab/solve.hpp"
#include "driftlab/verify.hpp"

namespace {

using namespace driftlab;

std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DRIFTLAB_OUT")) return env;
  return ".";
}

VectorField vector_from_exprs(const std::vector<std::string>& texts) {
  ScalarField c[3];
  for (std::size_t i = 0; i < texts.size() && i < 3; ++i)
    c[i] = ScalarField::from_expr(parse_expr(texts[i]));
  return VectorField(c[0], c[1], c[2]);
}

/// Overlays a parsed config file onto an ExperimentConfig. Unknown keys
/// and sections are usage errors.
ExperimentConfig apply_config(ExperimentConfig cfg, const Config& file) {
  file.require_sections({"mesh", "coefficients", "drift", "experiment", "control"});
  file.require_known("mesh", {"dim", "divisions", "box_lo", "box_hi"});
  file.require_known("coefficients", {"alpha", "a", "gamma", "f"});
  file.require_known("drift", {"kind", "e0", "beta", "center", "direction", "r"});
  file.require_known("experiment", {"id", "n_list", "m_list", "q_list", "delta_list", "levels"});
  file.require_known("control", {"mu", "p", "G", "G_s", "c0", "steps"});

  cfg.dim = file.get_int("mesh", "dim", cfg.dim);
  const std::vector<int> div_default{cfg.divisions[0], cfg.divisions[1], cfg.divisions[2]};
  const auto div = file.get_int_list("mesh", "divisions", div_default);
  for (std::size_t i = 0; i < div.size() && i < 3; ++i) cfg.divisions[i] = div[i];
  if (cfg.dim == 2) cfg.divisions[2] = 0;
  auto lo = file.get_real_list("mesh", "box_lo", {cfg.box.lo.begin(), cfg.box.lo.end()});
  auto hi = file.get_real_list("mesh", "box_hi", {cfg.box.hi.begin(), cfg.box.hi.end()});
  for (std::size_t i = 0; i < lo.size() && i < 3; ++i) cfg.box.lo[i] = lo[i];
  for (std::size_t i = 0; i < hi.size() && i < 3; ++i) cfg.box.hi[i] = hi[i];

  cfg.alpha = file.get_real("coefficients", "alpha", cfg.alpha);
  cfg.gamma = file.get_real("coefficients", "gamma", cfg.gamma);
  if (file.has("coefficients", "a"))
    cfg.a = ScalarField::from_expr(parse_expr(file.get_string("coefficients", "a", "0")));
  if (file.has("coefficients", "f"))
    cfg.f = ScalarField::from_expr(parse_expr(file.get_string("coefficients", "f", "1")));

  const std::string kind = file.get_string("drift", "kind", "");
  if (!kind.empty()) {
    if (kind == "constant")
      cfg.drift.kind = DriftKind::Constant;
    else if (kind == "oscillatory")
      cfg.drift.kind = DriftKind::Oscillatory;
    else if (kind == "concentrating")
      cfg.drift.kind = DriftKind::Concentrating;
    else
      throw ConfigError("drift.kind must be constant|oscillatory|concentrating, got " + kind);
  }
  cfg.drift.dim = cfg.dim;
  cfg.drift.box = cfg.box;
  if (file.has("drift", "e0"))
    cfg.drift.E0 = vector_from_exprs(file.get_expr_list("drift", "e0", {}));
  cfg.drift.beta = file.get_real("drift", "beta", cfg.drift.beta);
  cfg.drift.r = file.get_real("drift", "r", cfg.drift.r);
  auto ctr =
      file.get_real_list("drift", "center", {cfg.drift.center.begin(), cfg.drift.center.end()});
  for (std::size_t i = 0; i < ctr.size() && i < 3; ++i) cfg.drift.center[i] = ctr[i];
  auto dir = file.get_real_list("drift", "direction",
                                {cfg.drift.direction.begin(), cfg.drift.direction.end()});
  for (std::size_t i = 0; i < dir.size() && i < 3; ++i) cfg.drift.direction[i] = dir[i];

  cfg.id = file.get_string("experiment", "id", cfg.id);
  cfg.n_list = file.get_int_list("experiment", "n_list", cfg.n_list);
  cfg.m_list = file.get_real_list("experiment", "m_list", cfg.m_list);
  cfg.q_list = file.get_real_list("experiment", "q_list", cfg.q_list);
  cfg.delta_list = file.get_real_list("experiment", "delta_list", cfg.delta_list);
  cfg.mms_levels = file.get_int("experiment", "levels", cfg.mms_levels);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig defaults) {
  if (path.empty()) return defaults;
  return apply_config(std::move(defaults), Config::parse_file(path));
}

CoefficientSet single_solve_coeffs(const ExperimentConfig& cfg, int n) {
  CoefficientSet c;
  c.A = cfg.A;
  c.alpha = cfg.alpha;
  c.E = make_drift_field(cfg.drift, n);
  c.a = cfg.a;
  c.gamma = cfg.gamma;
  c.f = cfg.f;
  return c;
}

void emit(const ExperimentReport& rep, const std::string& dir, const std::string& name) {
  const std::string path = dir + "/" + name;
  write_report(rep, path);
  std::cout << "config hash: " << hex_hash(rep.config_hash) << "\n";
  std::cout << "wrote " << path << " (" << rep.rows.size() << " rows)\n";
}

ExperimentReport solve_report(const ExperimentConfig& cfg, bool adjoint, int n) {
  const Mesh mesh = build_box_mesh(cfg.dim, cfg.divisions, cfg.box);
  const CoefficientSet coeffs = single_solve_coeffs(cfg, n);
  const SolveReport sr = adjoint ? solve_adjoint(mesh, coeffs) : solve_primal(mesh, coeffs);
  ExperimentReport rep;
  rep.config_hash = cfg.hash();
  const std::string id = adjoint ? "adjoint" : "solve";
  rep.rows.push_back({id, n, 0.0, mesh.h, "u_L2", norm(mesh, sr.solution, NormKind::L2)});
  rep.rows.push_back(
      {id, n, 0.0, mesh.h, "u_H1semi", norm(mesh, sr.solution, NormKind::H1semi)});
  rep.rows.push_back({id, n, 0.0, mesh.h, "u_Linf", norm(mesh, sr.solution, NormKind::Linf)});
  rep.rows.push_back({id, n, 0.0, mesh.h, "min_nodal", sr.solution.nodal.minCoeff()});
  rep.rows.push_back({id, n, 0.0, mesh.h, "peclet", sr.peclet});
  rep.rows.push_back({id, n, 0.0, mesh.h, "residual", sr.solution.residual});
  return rep;
}

int dispatch(const std::string& sub, const std::string& config_path, const std::string& dir,
             int n, double delta, double mu, int steps, int levels, int dim, double gamma) {
  if (sub == "solve" || sub == "adjoint") {
    ExperimentConfig cfg = load_config(config_path, default_oscillatory_config());
    emit(solve_report(cfg, sub == "adjoint", n), dir, sub + ".csv");
    return 0;
  }
  if (sub == "regularize") {
    ExperimentConfig cfg = load_config(config_path, default_concentrating_config());
    const Mesh mesh = build_box_mesh(cfg.dim, cfg.divisions, cfg.box);
    const CoefficientSet coeffs = single_solve_coeffs(cfg, n);
    const RegularizedReport rr = solve_regularized(mesh, coeffs, delta);
    ExperimentReport rep;
    rep.config_hash = cfg.hash();
    rep.rows.push_back({"regularize", n, delta, mesh.h, "w_L2",
                        norm(mesh, rr.solution, NormKind::L2)});
    rep.rows.push_back({"regularize", n, delta, mesh.h, "newton_steps",
                        static_cast<double>(rr.newton_steps)});
    rep.rows.push_back({"regularize", n, delta, mesh.h, "residual", rr.solution.residual});
    emit(rep, dir, "regularize.csv");
    return 0;
  }
  if (sub == "homogenize") {
    ExperimentConfig cfg = load_config(config_path, default_oscillatory_config());
    emit(run_homogenization(cfg), dir, "homogenize.csv");
    return 0;
  }
  if (sub == "delta-sweep") {
    ExperimentConfig cfg = load_config(config_path, default_delta_sweep_config());
    emit(run_delta_sweep(cfg), dir, "delta-sweep.csv");
    return 0;
  }
  if (sub == "l1-check") {
    ExperimentConfig cfg = load_config(config_path, default_l1_config(gamma));
    emit(run_l1_check(cfg), dir, "l1-check.csv");
    return 0;
  }
  if (sub == "mms") {
    ExperimentConfig cfg = load_config(config_path, default_mms_config(dim));
    if (levels > 0) cfg.mms_levels = levels;
    const ExperimentReport rep = run_mms_convergence(cfg);
    emit(rep, dir, "mms.csv");
    if (cfg.mms_levels >= 2)
      std::cout << "fitted orders: L2 " << rep.get("L2_order", 0) << ", H1 "
                << rep.get("H1_order", 0) << "\n";
    return 0;
  }
  if (sub == "maxprinciple") {
    ExperimentConfig cfg = load_config(config_path, default_maxprinciple_config());
    const ExperimentReport rep = max_principle_probe(cfg);
    emit(rep, dir, "maxprinciple.csv");
    return rep.get("pass", 0) == 1.0 ? 0 : 2;
  }
  if (sub == "control") {
    ControlProblem prob = default_control_problem(mu);
    std::vector<double> c0{0.3, -0.2, 0.1};
    if (!config_path.empty()) {
      const Config file = Config::parse_file(config_path);
      file.require_known("control", {"mu", "p", "G", "G_s", "c0", "steps"});
      prob.mu = file.get_real("control", "mu", prob.mu);
      prob.p = file.get_real("control", "p", prob.p);
      if (file.has("control", "G")) {
        prob.G = parse_expr(file.get_string("control", "G", ""));
        prob.G_s = parse_expr(file.get_string("control", "G_s", ""));
      }
      c0 = file.get_real_list("control", "c0", c0);
      steps = file.get_int("control", "steps", steps);
    }
    const OptimizeResult res = optimize(prob, c0, steps);
    const std::string path = dir + "/control-trace.csv";
    write_trace(res, path);
    std::cout << "config hash: " << hex_hash(fnv1a(render_trace(res))) << "\n";
    std::cout << "wrote " << path << "\nfinal J " << res.J << ", c =";
    for (double ck : res.c) std::cout << ' ' << ck;
    std::cout << (res.stalled ? " (stalled)" : "") << "\n";
    return res.stalled ? 2 : 0;
  }
  if (sub == "verify") {
    const auto results = run_acceptance();
    bool all = true;
    for (const auto& r : results) {
      std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.index << " " << r.name << ": "
                << r.detail << "\n";
      all = all && r.pass;
    }
    std::cout << (all ? "verify: all criteria pass\n" : "verify: FAILURES present\n");
    return all ? 0 : 2;
  }
  std::cerr << "unknown subcommand: " << sub << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftlab: numerical laboratory for the non-coercive drift problem"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  int jobs = 1, n = 1, steps = 50, levels = 0, dim = 2;
  double delta = 1e-3, mu = 1.0, gamma = 1.0;

  const char* names[] = {"solve",      "adjoint",  "regularize",   "homogenize", "delta-sweep",
                         "l1-check",   "mms",      "maxprinciple", "control",    "verify"};
  for (const char* name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file path");
    sub->add_option("--out", out_flag, "output directory (default: $DRIFTLAB_OUT or .)");
    sub->add_option("--jobs", jobs, "worker cap (runs are single-threaded at desk scale)");
    if (std::string(name) == "solve" || std::string(name) == "adjoint" ||
        std::string(name) == "regularize")
      sub->add_option("--n", n, "drift sequence index");
    if (std::string(name) == "regularize") sub->add_option("--delta", delta, "regularization");
    if (std::string(name) == "control") {
      sub->add_option("--mu", mu, "penalty weight");
      sub->add_option("--steps", steps, "descent steps");
    }
    if (std::string(name) == "mms") {
      sub->add_option("--levels", levels, "refinement levels");
      sub->add_option("--dim", dim, "dimension (2 or 3)");
    }
    if (std::string(name) == "l1-check") sub->add_option("--gamma", gamma, "absorption bound");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return dispatch(sub, config_path, out_dir(out_flag), n, delta, mu, steps, levels, dim,
                    gamma);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
