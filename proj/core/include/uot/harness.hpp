#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uot/kernel_estimator.hpp"
#include "uot/measures.hpp"
#include "uot/metrics.hpp"
#include "uot/plan_estimator.hpp"
#include "uot/solver.hpp"

namespace uot {

enum class EstimatorKind { Pb1nn, PbNw, KernelPlugin };
enum class MassMode { Known, Poisson };

std::string to_string(EstimatorKind kind);
std::string to_string(MassMode mode);
EstimatorKind estimator_from_string(const std::string& name);

// Simulation sweep configuration. Defaults reproduce the sine benchmark:
// source shift 0.3 with mass 1, target shift 0.7 with mass 2.5, 10 seeds,
// n in {100, 200, 500, 1000}.
struct ExperimentConfig {
  int dim = 1;
  DensityKind density_kind = DensityKind::SineShift;
  std::vector<int> n_list = {100, 200, 500, 1000};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double mass_mu = 1.0;
  double mass_nu = 2.5;
  double c_mu = 0.3;
  double c_nu = 0.7;
  std::vector<EstimatorKind> estimators = {EstimatorKind::Pb1nn};
  SolverConfig solver;
  ClipBounds clip;
  double kernel_l0 = 10.0;  // anchor bandwidth, tuned once at n0
  int kernel_n0 = 1000;
  double kernel_alpha = 2.0;
  int grid_resolution = 128;
  int oracle_resolution = 256;
  MassMode mass_mode = MassMode::Known;
  std::optional<double> nw_bandwidth;  // default: n^{-1/(d+4)} per cell

  void validate() const;  // throws ConfigError

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  // FNV-1a over the canonical JSON dump; stable across runs and platforms.
  std::string config_hash() const;
};

// Fine-grid plug-in oracle built from the analytic densities, solved at a
// tightened eps_final of 1e-4.
TransportGrowthPair compute_oracle(const ExperimentConfig& config);

struct BenchRow {
  std::uint64_t seed = 0;
  int n = 0;
  int d = 0;
  std::string estimator;
  std::string mass_mode;
  double map_mse = 0.0;
  double growth_mse = 0.0;
  std::string status = "ok";  // "ok" or "failed"
  std::int64_t runtime_ms = 0;
};

// One row per (seed, n, estimator) cell, sorted in that order. Solver
// failures are recorded as status=failed rows and the sweep continues.
std::vector<BenchRow> run_benchmark(const ExperimentConfig& config);

void write_benchmark_csv(const std::filesystem::path& path,
                         const ExperimentConfig& config,
                         const std::vector<BenchRow>& rows);
std::vector<BenchRow> read_benchmark_csv(const std::filesystem::path& path);

struct RateRow {
  std::string estimator;
  double map_slope = 0.0;
  double map_stderr = 0.0;
  double growth_slope = 0.0;
  double growth_stderr = 0.0;
};

// Seed-averaged mse per (estimator, n), then log-log OLS per estimator.
std::vector<RateRow> report_rates(const std::vector<BenchRow>& rows);

}  // namespace uot
