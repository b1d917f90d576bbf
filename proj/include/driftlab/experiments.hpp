#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftlab/fields.hpp"
#include "driftlab/mesh.hpp"

namespace driftlab {

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameters for one experiment run. Defaults reproduce the headline
/// acceptance configurations (see default_* constructors).
struct ExperimentConfig {
  std::string id = "experiment";
  int dim = 2;
  std::array<int, 3> divisions{16, 16, 0};
  Box box;
  // Base coefficients; E is supplied by `drift` per n.
  MatrixField A;
  double alpha = 1.0;
  ScalarField a;
  double gamma = 0.0;
  ScalarField f = ScalarField::constant(1.0);
  DriftSequenceSpec drift;
  std::vector<int> n_list{1, 2, 4, 8, 16, 32};
  std::vector<double> m_list{1.0, 2.0, 4.0};
  std::vector<double> q_list{1.0, 2.0};
  std::vector<double> delta_list{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  int mms_levels = 4;
  std::uint64_t seed = 2024;

  /// FNV-1a over a canonical rendering of every field above.
  std::uint64_t hash() const;
};

ExperimentConfig default_oscillatory_config();
ExperimentConfig default_concentrating_config();
ExperimentConfig default_delta_sweep_config();
ExperimentConfig default_l1_config(double gamma);
ExperimentConfig default_mms_config(int dim);
ExperimentConfig default_maxprinciple_config();

struct ReportRow {
  std::string experiment;
  int n = 0;
  double delta = 0.0;
  double h = 0.0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::uint64_t config_hash = 0;

  double get(const std::string& metric, int n) const;
  bool has(const std::string& metric, int n) const;
};

/// For each n: solve u_n with E_n, compare to the limit problem u_0 via
/// truncation/log-power differences, weak dictionary probes, Boccardo
/// ratios and superlevel measures. Failed solves yield a `failed` row for
/// that n instead of aborting the run.
ExperimentReport run_homogenization(const ExperimentConfig& cfg);

/// For each (n, delta): solve the regularized problem, report the distance
/// to the linear solution, both sides of the energy bound, Newton steps.
ExperimentReport run_delta_sweep(const ExperimentConfig& cfg);

/// L1 bound ||u||_L1 <= (1/gamma)||f||_L1; requires gamma > 0.
ExperimentReport run_l1_check(const ExperimentConfig& cfg);

/// Manufactured solution u* = prod sin(pi x_i) with symbolically derived
/// source; reports errors per level and fitted orders.
ExperimentReport run_mms_convergence(const ExperimentConfig& cfg);

/// Adjoint solve with f >= 0; reports min nodal value and mesh Peclet.
ExperimentReport max_principle_probe(const ExperimentConfig& cfg);

/// CSV with provenance comments, header `experiment,n,delta,h,metric,value`,
/// LF endings, full-precision values, deterministic row order.
void write_report(const ExperimentReport& report, const std::string& path);
std::string render_report(const ExperimentReport& report);

/// Fixed dictionary of 6 low-frequency tensor-sine fields vanishing on the
/// unit-box boundary; the weak-convergence surrogate.
std::vector<ScalarField> probe_dictionary(int dim);

/// Least-squares slope of log(err) against log(h).
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace driftlab
