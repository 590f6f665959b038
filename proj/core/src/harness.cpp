#include "uot/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uot/kernel_density.hpp"
#include "uot/rng.hpp"

namespace uot {

namespace {
using nlohmann::json;
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Pb1nn: return "pb_1nn";
    case EstimatorKind::PbNw: return "pb_nw";
    case EstimatorKind::KernelPlugin: return "kernel_plugin";
  }
  throw InvalidArgument("unknown estimator kind");
}

std::string to_string(MassMode mode) {
  return mode == MassMode::Known ? "known" : "poisson";
}

EstimatorKind estimator_from_string(const std::string& name) {
  if (name == "pb_1nn") return EstimatorKind::Pb1nn;
  if (name == "pb_nw") return EstimatorKind::PbNw;
  if (name == "kernel_plugin") return EstimatorKind::KernelPlugin;
  throw ConfigError("unknown estimator '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (n_list.empty()) throw ConfigError("n_list must be nonempty");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      n_list.front() < 1) {
    throw ConfigError("n_list must be ascending and positive");
  }
  if (seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (!(mass_mu > 0.0) || !(mass_nu > 0.0)) {
    throw ConfigError("masses must be positive");
  }
  if (!(c_mu > 0.0 && c_mu < 1.0) || !(c_nu > 0.0 && c_nu < 1.0)) {
    throw ConfigError("sine shifts must lie in (0,1)");
  }
  if (estimators.empty()) throw ConfigError("estimators must be nonempty");
  if (grid_resolution < 2) throw ConfigError("grid_resolution must be >= 2");
  if (oracle_resolution < 2 * grid_resolution) {
    throw ConfigError("oracle_resolution must be >= 2 * grid_resolution");
  }
  if (!(kernel_l0 > 0.0) || kernel_n0 < 1 || !(kernel_alpha > 1.0)) {
    throw ConfigError("kernel anchor requires L0 > 0, n0 >= 1, alpha > 1");
  }
  if (nw_bandwidth && !(*nw_bandwidth > 0.0)) {
    throw ConfigError("nw_bandwidth must be positive");
  }
}

namespace {

json config_to_json(const ExperimentConfig& c) {
  json out;
  out["dim"] = c.dim;
  out["density_kind"] =
      c.density_kind == DensityKind::SineShift ? "sine" : "uniform";
  out["n_list"] = c.n_list;
  out["seeds"] = c.seeds;
  out["mass_mu"] = c.mass_mu;
  out["mass_nu"] = c.mass_nu;
  out["c_mu"] = c.c_mu;
  out["c_nu"] = c.c_nu;
  std::vector<std::string> estimators;
  estimators.reserve(c.estimators.size());
  for (auto kind : c.estimators) estimators.push_back(to_string(kind));
  out["estimators"] = estimators;
  out["solver"] = {{"eps_init", c.solver.eps_init},
                   {"eps_final", c.solver.eps_final},
                   {"eps_decay", c.solver.eps_decay},
                   {"max_iters_per_eps", c.solver.max_iters_per_eps},
                   {"fixed_point_tol", c.solver.fixed_point_tol}};
  out["clip"] = {{"w_minus", c.clip.w_minus}, {"w_plus", c.clip.w_plus}};
  out["kernel_anchor"] = {{"l0", c.kernel_l0},
                          {"n0", c.kernel_n0},
                          {"alpha", c.kernel_alpha}};
  out["grid_resolution"] = c.grid_resolution;
  out["oracle_resolution"] = c.oracle_resolution;
  out["mass_mode"] = to_string(c.mass_mode);
  if (c.nw_bandwidth) out["nw_bandwidth"] = *c.nw_bandwidth;
  return out;
}

ExperimentConfig config_from_json(const json& in) {
  ExperimentConfig c;
  try {
    if (in.contains("dim")) c.dim = in["dim"].get<int>();
    if (in.contains("density_kind")) {
      const auto kind = in["density_kind"].get<std::string>();
      if (kind == "sine") {
        c.density_kind = DensityKind::SineShift;
      } else if (kind == "uniform") {
        c.density_kind = DensityKind::Uniform;
      } else {
        throw ConfigError("density_kind must be 'sine' or 'uniform'");
      }
    }
    // Paper grids: 128, 64, 32, 32 for d = 1..4.
    c.grid_resolution = c.dim == 1 ? 128 : (c.dim == 2 ? 64 : 32);
    c.oracle_resolution = 2 * c.grid_resolution;
    if (in.contains("n_list")) {
      c.n_list = in["n_list"].get<std::vector<int>>();
    }
    if (in.contains("seeds")) {
      // Either an explicit list or a count k meaning seeds 1..k.
      if (in["seeds"].is_number()) {
        const auto k = in["seeds"].get<int>();
        if (k < 1) throw ConfigError("seeds count must be >= 1");
        c.seeds.clear();
        for (int s = 1; s <= k; ++s) c.seeds.push_back(s);
      } else {
        c.seeds = in["seeds"].get<std::vector<std::uint64_t>>();
      }
    }
    if (in.contains("mass_mu")) c.mass_mu = in["mass_mu"].get<double>();
    if (in.contains("mass_nu")) c.mass_nu = in["mass_nu"].get<double>();
    if (in.contains("c_mu")) c.c_mu = in["c_mu"].get<double>();
    if (in.contains("c_nu")) c.c_nu = in["c_nu"].get<double>();
    if (in.contains("estimators")) {
      c.estimators.clear();
      for (const auto& name : in["estimators"]) {
        c.estimators.push_back(
            estimator_from_string(name.get<std::string>()));
      }
    }
    if (in.contains("solver")) {
      const auto& s = in["solver"];
      if (s.contains("eps_init")) {
        c.solver.eps_init = s["eps_init"].get<double>();
      }
      if (s.contains("eps_final")) {
        c.solver.eps_final = s["eps_final"].get<double>();
      }
      if (s.contains("eps_decay")) {
        c.solver.eps_decay = s["eps_decay"].get<double>();
      }
      if (s.contains("max_iters_per_eps")) {
        c.solver.max_iters_per_eps = s["max_iters_per_eps"].get<int>();
      }
      if (s.contains("fixed_point_tol")) {
        c.solver.fixed_point_tol = s["fixed_point_tol"].get<double>();
      }
    }
    if (in.contains("clip")) {
      const auto& b = in["clip"];
      if (b.contains("w_minus")) c.clip.w_minus = b["w_minus"].get<double>();
      if (b.contains("w_plus")) c.clip.w_plus = b["w_plus"].get<double>();
    }
    if (in.contains("kernel_anchor")) {
      const auto& a = in["kernel_anchor"];
      if (a.contains("l0")) c.kernel_l0 = a["l0"].get<double>();
      if (a.contains("n0")) c.kernel_n0 = a["n0"].get<int>();
      if (a.contains("alpha")) c.kernel_alpha = a["alpha"].get<double>();
    }
    if (in.contains("grid_resolution")) {
      c.grid_resolution = in["grid_resolution"].get<int>();
      if (!in.contains("oracle_resolution")) {
        c.oracle_resolution = 2 * c.grid_resolution;
      }
    }
    if (in.contains("oracle_resolution")) {
      c.oracle_resolution = in["oracle_resolution"].get<int>();
    }
    if (in.contains("mass_mode")) {
      const auto mode = in["mass_mode"].get<std::string>();
      if (mode == "known") {
        c.mass_mode = MassMode::Known;
      } else if (mode == "poisson") {
        c.mass_mode = MassMode::Poisson;
      } else {
        throw ConfigError("mass_mode must be 'known' or 'poisson'");
      }
    }
    if (in.contains("nw_bandwidth")) {
      c.nw_bandwidth = in["nw_bandwidth"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(parsed);
}

std::string ExperimentConfig::to_json_text() const {
  return config_to_json(*this).dump(2);
}

std::string ExperimentConfig::config_hash() const {
  const std::string canonical = config_to_json(*this).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char byte : canonical) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

namespace {

SyntheticDensity source_density(const ExperimentConfig& c) {
  return c.density_kind == DensityKind::Uniform
             ? SyntheticDensity::uniform(c.dim)
             : SyntheticDensity::sine_shift(c.c_mu, c.dim);
}

SyntheticDensity target_density(const ExperimentConfig& c) {
  return c.density_kind == DensityKind::Uniform
             ? SyntheticDensity::uniform(c.dim)
             : SyntheticDensity::sine_shift(c.c_nu, c.dim);
}

}  // namespace

TransportGrowthPair compute_oracle(const ExperimentConfig& config) {
  config.validate();
  const SyntheticDensity p = source_density(config);
  const SyntheticDensity q = target_density(config);
  const GridMeasure mu_grid =
      density_to_grid(p, config.mass_mu, config.oracle_resolution);
  const GridMeasure nu_grid =
      density_to_grid(q, config.mass_nu, config.oracle_resolution);
  SolverConfig solver = config.solver;
  solver.eps_final = std::min(solver.eps_final, 1e-4);
  return fit_kernel_pair(mu_grid, nu_grid, solver, config.clip).pair;
}

namespace {

struct SampledMeasure {
  Eigen::MatrixXd points;
  MassEstimate mass;
};

// Known mode draws exactly n points with the configured mass. Poisson mode
// runs the point process at exposure n (N ~ Poisson(n) points) and rescales
// the count into a mass estimate: mass * N / n, which is unbiased for the
// configured mass.
SampledMeasure draw_measure(const SyntheticDensity& density, int n,
                            double mass, MassMode mode, std::uint64_t seed) {
  if (mode == MassMode::Known) {
    return {sample_iid(density, n, seed), MassEstimate::known(mass)};
  }
  auto [points, count_estimate] =
      sample_ppp(density, static_cast<double>(n), seed);
  if (!count_estimate.valid()) {
    throw EmptySample("poisson draw produced an empty sample");
  }
  MassEstimate rescaled{count_estimate.value * mass / n,
                        MassSource::PoissonCount};
  return {std::move(points), rescaled};
}

TransportGrowthPair fit_plan_estimator(const ExperimentConfig& config,
                                       EstimatorKind kind,
                                       const SampledMeasure& source,
                                       const SampledMeasure& target) {
  const DiscreteMeasure mu = weighted_empirical(source.points, source.mass);
  const DiscreteMeasure nu = weighted_empirical(target.points, target.mass);
  const SolveResult solved = solve_discrete_uot(mu, nu, config.solver);
  auto [t_hat, r_hat] =
      barycentric_rows(solved.plan, mu.points(), nu.points());
  auto [a_hat, lambda_hat] = growth_from_rows(r_hat, mu.weights(), t_hat,
                                              mu.points(), config.clip);
  RowEstimates rows{std::move(t_hat), std::move(r_hat), std::move(a_hat),
                    std::move(lambda_hat)};
  if (kind == EstimatorKind::Pb1nn) {
    return extend_1nn(std::move(rows), mu.points());
  }
  const double bandwidth = config.nw_bandwidth.value_or(
      std::pow(static_cast<double>(mu.size()), -1.0 / (config.dim + 4)));
  return extend_nw(std::move(rows), mu.points(), SmoothingKernel::Gaussian,
                   bandwidth);
}

TransportGrowthPair fit_kernel_plugin(const ExperimentConfig& config,
                                      const SampledMeasure& source,
                                      const SampledMeasure& target) {
  const double l_n =
      resolution_rule(static_cast<int>(source.points.rows()), config.dim,
                      config.kernel_alpha, config.kernel_l0, config.kernel_n0);
  const double l_m =
      resolution_rule(static_cast<int>(target.points.rows()), config.dim,
                      config.kernel_alpha, config.kernel_l0, config.kernel_n0);
  const KernelDensity p_raw = fit_density(source.points, l_n);
  const KernelDensity q_raw = fit_density(target.points, l_m);
  const GridMeasure mu_grid = renormalize_positive(
      [&](const Eigen::VectorXd& x) { return p_raw(x); }, config.dim,
      config.grid_resolution, source.mass);
  const GridMeasure nu_grid = renormalize_positive(
      [&](const Eigen::VectorXd& x) { return q_raw(x); }, config.dim,
      config.grid_resolution, target.mass);
  return fit_kernel_pair(mu_grid, nu_grid, config.solver, config.clip).pair;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const ExperimentConfig& config) {
  config.validate();
  const SyntheticDensity p = source_density(config);
  const SyntheticDensity q = target_density(config);
  const TransportGrowthPair oracle = compute_oracle(config);
  const GridMeasure risk_grid =
      density_to_grid(p, config.mass_mu, config.grid_resolution);

  std::vector<BenchRow> rows;
  for (const std::uint64_t seed : config.seeds) {
    for (const int n : config.n_list) {
      for (const EstimatorKind kind : config.estimators) {
        BenchRow row;
        row.seed = seed;
        row.n = n;
        row.d = config.dim;
        row.estimator = to_string(kind);
        row.mass_mode = to_string(config.mass_mode);
        const auto started = std::chrono::steady_clock::now();
        try {
          const SampledMeasure source =
              draw_measure(p, n, config.mass_mu, config.mass_mode,
                           derive_seed(seed, 2 * n));
          const SampledMeasure target =
              draw_measure(q, n, config.mass_nu, config.mass_mode,
                           derive_seed(seed, 2 * n + 1));
          const TransportGrowthPair fitted =
              kind == EstimatorKind::KernelPlugin
                  ? fit_kernel_plugin(config, source, target)
                  : fit_plan_estimator(config, kind, source, target);
          std::tie(row.map_mse, row.growth_mse) =
              map_risk(fitted, oracle, risk_grid);
        } catch (const Error&) {
          row.status = "failed";
          row.map_mse = std::nan("");
          row.growth_mse = std::nan("");
        }
        row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        rows.push_back(std::move(row));
      }
    }
  }
  // Deterministic output order regardless of execution order.
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.seed, a.n, a.estimator) <
           std::tie(b.seed, b.n, b.estimator);
  });
  return rows;
}

void write_benchmark_csv(const std::filesystem::path& path,
                         const ExperimentConfig& config,
                         const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  out << "# uot bench v0.1.0 config_hash=" << config.config_hash() << "\n";
  out << "# generated_at_unix_ms="
      << std::chrono::duration_cast<std::chrono::milliseconds>(now).count()
      << "\n";
  out << "seed,n,d,estimator,mass_mode,map_mse,growth_mse,status,runtime_ms"
      << "\n";
  out.precision(17);
  for (const auto& row : rows) {
    out << row.seed << "," << row.n << "," << row.d << "," << row.estimator
        << "," << row.mass_mode << "," << row.map_mse << ","
        << row.growth_mse << "," << row.status << "," << row.runtime_ms
        << "\n";
  }
}

std::vector<BenchRow> read_benchmark_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<BenchRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    BenchRow row;
    std::getline(ss, field, ',');
    row.seed = std::stoull(field);
    std::getline(ss, field, ',');
    row.n = std::stoi(field);
    std::getline(ss, field, ',');
    row.d = std::stoi(field);
    std::getline(ss, row.estimator, ',');
    std::getline(ss, row.mass_mode, ',');
    std::getline(ss, field, ',');
    row.map_mse = std::stod(field);
    std::getline(ss, field, ',');
    row.growth_mse = std::stod(field);
    std::getline(ss, row.status, ',');
    std::getline(ss, field, ',');
    row.runtime_ms = std::stoll(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RateRow> report_rates(const std::vector<BenchRow>& rows) {
  // estimator -> n -> mse accumulators over seeds
  std::map<std::string, std::map<int, std::vector<std::pair<double, double>>>>
      cells;
  for (const auto& row : rows) {
    if (row.status != "ok") continue;
    cells[row.estimator][row.n].push_back({row.map_mse, row.growth_mse});
  }
  std::vector<RateRow> out;
  for (const auto& [estimator, by_n] : cells) {
    std::vector<std::pair<double, double>> map_points, growth_points;
    for (const auto& [n, mses] : by_n) {
      double map_sum = 0.0, growth_sum = 0.0;
      for (const auto& [m, g] : mses) {
        map_sum += m;
        growth_sum += g;
      }
      const auto k = static_cast<double>(mses.size());
      map_points.push_back({static_cast<double>(n), map_sum / k});
      growth_points.push_back({static_cast<double>(n), growth_sum / k});
    }
    const RateFit map_fit = loglog_rate_fit(map_points);
    const RateFit growth_fit = loglog_rate_fit(growth_points);
    out.push_back({estimator, map_fit.slope, map_fit.stderr_slope,
                   growth_fit.slope, growth_fit.stderr_slope});
  }
  return out;
}

}  // namespace uot
