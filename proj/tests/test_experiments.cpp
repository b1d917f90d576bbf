#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftlab/experiments.hpp"
#include "driftlab/norms.hpp"

using namespace driftlab;

TEST_CASE("fit_order recovers exact power laws") {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e2, e1;
  for (double hi : h) {
    e2.push_back(3.0 * hi * hi);
    e1.push_back(0.7 * hi);
  }
  CHECK(fit_order(h, e2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit_order(h, e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_order({0.5}, {1.0}), ExperimentError);
  CHECK_THROWS_AS(fit_order({0.5, 0.25}, {1.0, 0.0}), ExperimentError);
}

TEST_CASE("probe dictionary vanishes on the unit-box boundary") {
  for (int dim : {2, 3}) {
    const auto dict = probe_dictionary(dim);
    REQUIRE(dict.size() == 6);
    for (const auto& phi : dict) {
      CHECK(std::abs(phi({0.0, 0.37, 0.5})) < 1e-14);
      CHECK(std::abs(phi({0.42, 1.0, 0.3})) < 1e-14);
      if (dim == 3) CHECK(std::abs(phi({0.42, 0.3, 0.0})) < 1e-14);
    }
  }
}

TEST_CASE("config hash deterministic and sensitive") {
  const ExperimentConfig a = default_oscillatory_config();
  ExperimentConfig b = default_oscillatory_config();
  CHECK(a.hash() == b.hash());
  b.drift.beta = 2.0;
  CHECK(a.hash() != b.hash());
  ExperimentConfig c = default_oscillatory_config();
  c.n_list = {1, 2};
  CHECK(a.hash() != c.hash());
}

TEST_CASE("report CSV structure and determinism") {
  ExperimentReport rep;
  rep.config_hash = 0xabcdefull;
  rep.rows.push_back({"demo", 3, 1e-2, 0.25, "metric_a", 1.5});
  rep.rows.push_back({"demo", 4, 0.0, 0.25, "metric_b", -2.0});
  const std::string text = render_report(rep);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# config=0000000000abcdef");
  std::getline(in, line);
  CHECK(line.substr(0, 10) == "# version=");
  std::getline(in, line);
  CHECK(line == "experiment,n,delta,h,metric,value");
  std::getline(in, line);
  CHECK(line.substr(0, 7) == "demo,3,");
  CHECK(line.find("metric_a") != std::string::npos);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  CHECK(render_report(rep) == text);
  // Round trip through a file, byte for byte (LF endings included).
  const std::string path = "test_report_tmp.csv";
  write_report(rep, path);
  std::ifstream f(path, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == text);
  std::remove(path.c_str());
}

TEST_CASE("mms convergence orders on a small ladder") {
  ExperimentConfig cfg = default_mms_config(2);
  cfg.divisions = {4, 4, 0};
  cfg.mms_levels = 3;
  // Exercise the divergence term too: E = (x1, 0) has div E = 1.
  cfg.drift.E0 = VectorField(ScalarField::from_expr(parse_expr("x1")),
                             ScalarField::from_expr(parse_expr("0")));
  const ExperimentReport rep = run_mms_convergence(cfg);
  CHECK(rep.get("L2_order", 0) >= 1.7);
  CHECK(rep.get("H1_order", 0) >= 0.8);
  CHECK(rep.get("L2_error", 1) > rep.get("L2_error", 3));
  // Errors present for every level.
  for (int level = 1; level <= 3; ++level) {
    CHECK(rep.has("L2_error", level));
    CHECK(rep.has("H1_error", level));
  }
}

TEST_CASE("constant drift kind: homogenization differences vanish") {
  ExperimentConfig cfg = default_oscillatory_config();
  cfg.divisions = {8, 8, 0};
  cfg.drift.kind = DriftKind::Constant;
  cfg.n_list = {1, 3};
  const ExperimentReport rep = run_homogenization(cfg);
  for (int n : cfg.n_list) {
    CHECK(rep.get("full_L2_diff", n) <= 1e-9);
    CHECK(rep.get("Tm1_L2_diff", n) <= 1e-9);
    CHECK(rep.get("logq2_L2_diff", n) <= 1e-9);
    for (int j = 0; j < 6; ++j)
      CHECK(rep.get("weakgap_d" + std::to_string(j), n) <= 1e-9);
  }
}

TEST_CASE("singular problem flags failed rows instead of throwing") {
  ExperimentConfig cfg = default_oscillatory_config();
  cfg.divisions = {4, 4, 0};
  cfg.n_list = {1};
  cfg.A = MatrixField::constant({{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}});
  const ExperimentReport rep = run_homogenization(cfg);
  REQUIRE(rep.rows.size() >= 1);
  bool flagged = false;
  for (const auto& r : rep.rows) flagged = flagged || r.metric == "failed";
  CHECK(flagged);
}

TEST_CASE("delta sweep: consistency as delta vanishes and energy bound") {
  ExperimentConfig cfg = default_concentrating_config();
  cfg.id = "sweep-test";
  cfg.divisions = {4, 4, 4};
  cfg.f = ScalarField::constant(5.0);
  cfg.n_list = {1};
  cfg.delta_list = {1e-2, 1e-6, 1e-12};
  const ExperimentReport rep = run_delta_sweep(cfg);
  double prev = 1e300;
  for (double delta : cfg.delta_list) {
    double wmu = -1.0, lhs = 0.0, rhs = 0.0;
    for (const auto& r : rep.rows) {
      if (r.n != 1 || r.delta != delta) continue;
      if (r.metric == "w_minus_u_L2") wmu = r.value;
      if (r.metric == "estwnd_lhs") lhs = r.value;
      if (r.metric == "estwnd_rhs") rhs = r.value;
    }
    REQUIRE(wmu >= 0.0);
    CHECK(wmu <= prev);
    CHECK(lhs <= rhs + 1e-6);
    prev = wmu;
  }
  CHECK(prev <= 1e-6);  // delta = 1e-12 is a vanishing perturbation
}

TEST_CASE("l1 bound check") {
  const ExperimentReport rep = run_l1_check(default_l1_config(1.0));
  CHECK(rep.get("f_L1", 0) == doctest::Approx(1.0));
  CHECK(rep.get("u_L1", 0) <= rep.get("bound", 0));
  CHECK(rep.get("violated", 0) == 0.0);

  ExperimentConfig zero = default_l1_config(1.0);
  zero.f = ScalarField::constant(0.0);
  const ExperimentReport rz = run_l1_check(zero);
  CHECK(rz.get("u_L1", 0) == doctest::Approx(0.0));
  CHECK(rz.get("bound", 0) == doctest::Approx(0.0));

  ExperimentConfig bad = default_l1_config(1.0);
  bad.gamma = 0.0;
  CHECK_THROWS_AS(run_l1_check(bad), ExperimentError);
}

TEST_CASE("max principle probe passes at moderate Peclet") {
  const ExperimentReport rep = max_principle_probe(default_maxprinciple_config());
  CHECK(rep.get("peclet", 0) <= 1.0);
  CHECK(rep.get("min_nodal", 0) >= -1e-8);
  CHECK(rep.get("pass", 0) == 1.0);
}
