#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "uot/measures.hpp"
#include "uot/plan_estimator.hpp"

namespace uot {

struct RiskReport {
  double map_mse = 0.0;     // integral of |T_hat - T_0|^2 d mu
  double growth_mse = 0.0;  // integral of |lambda_hat - lambda_0|^2 d mu
  int n = 0;
  std::string estimator_id;
  std::uint64_t seed = 0;
};

// Quadrature risks against an oracle pair over the analytic source grid:
// cell weights are density * cell volume * mass.
std::pair<double, double> map_risk(const TransportGrowthPair& fitted,
                                   const TransportGrowthPair& oracle,
                                   const GridMeasure& mu_grid);

// Exact squared 2-Wasserstein distance between equal-mass measures on the
// line via the quantile coupling. Returns W_2^2.
double w2_1d_exact(const DiscreteMeasure& alpha, const DiscreteMeasure& beta);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

// OLS of log(mse) on log(n).
RateFit loglog_rate_fit(std::span<const std::pair<double, double>> points);

}  // namespace uot
