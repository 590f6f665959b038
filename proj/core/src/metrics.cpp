#include "uot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace uot {

std::pair<double, double> map_risk(const TransportGrowthPair& fitted,
                                   const TransportGrowthPair& oracle,
                                   const GridMeasure& mu_grid) {
  if (fitted.dim() != mu_grid.dim() || oracle.dim() != mu_grid.dim()) {
    throw DimensionMismatch("map_risk: dimension mismatch");
  }
  double map_mse = 0.0;
  double growth_mse = 0.0;
  for (int flat = 0; flat < mu_grid.size(); ++flat) {
    const double w = mu_grid.cell_weight(flat);
    if (w == 0.0) continue;
    const Eigen::VectorXd x = mu_grid.cell_center(flat);
    const PairEvaluation got = fitted.evaluate(x);
    const PairEvaluation ref = oracle.evaluate(x);
    map_mse += w * (got.target - ref.target).squaredNorm();
    const double dl = got.lambda - ref.lambda;
    growth_mse += w * dl * dl;
  }
  return {map_mse, growth_mse};
}

double w2_1d_exact(const DiscreteMeasure& alpha, const DiscreteMeasure& beta) {
  if (alpha.dim() != 1 || beta.dim() != 1) {
    throw DimensionMismatch("w2_1d_exact: measures must be 1-dimensional");
  }
  if (std::abs(alpha.total_mass() - beta.total_mass()) > 1e-9) {
    throw MassMismatch("w2_1d_exact: total masses differ");
  }
  // Sort atoms, then sweep both cumulative weight profiles in lockstep;
  // each chunk of shared quantile mass couples two fixed locations.
  auto sorted = [](const DiscreteMeasure& measure) {
    std::vector<std::pair<double, double>> atoms(measure.size());
    for (int i = 0; i < measure.size(); ++i) {
      atoms[i] = {measure.points()(i, 0), measure.weights()[i]};
    }
    std::sort(atoms.begin(), atoms.end());
    return atoms;
  };
  const auto a = sorted(alpha);
  const auto b = sorted(beta);
  double cost = 0.0;
  std::size_t i = 0, j = 0;
  double rem_a = a[0].second, rem_b = b[0].second;
  while (i < a.size() && j < b.size()) {
    const double chunk = std::min(rem_a, rem_b);
    const double diff = a[i].first - b[j].first;
    cost += chunk * diff * diff;
    rem_a -= chunk;
    rem_b -= chunk;
    if (rem_a <= 0.0 && ++i < a.size()) rem_a = a[i].second;
    if (rem_b <= 0.0 && ++j < b.size()) rem_b = b[j].second;
  }
  return cost;
}

RateFit loglog_rate_fit(std::span<const std::pair<double, double>> points) {
  std::set<double> distinct;
  for (const auto& [n, mse] : points) {
    if (!(n > 0.0) || !(mse > 0.0)) {
      throw InvalidArgument("loglog_rate_fit: need n > 0 and mse > 0");
    }
    distinct.insert(n);
  }
  if (distinct.size() < 2) {
    throw DegenerateFit("loglog_rate_fit: fewer than 2 distinct n values");
  }
  const auto k = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, mse] : points) {
    const double x = std::log(n);
    const double y = std::log(mse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = sxx - sx * sx / k;
  RateFit fit;
  fit.slope = (sxy - sx * sy / k) / denom;
  fit.intercept = (sy - fit.slope * sx) / k;
  if (points.size() > 2) {
    double rss = 0.0;
    for (const auto& [n, mse] : points) {
      const double r =
          std::log(mse) - (fit.intercept + fit.slope * std::log(n));
      rss += r * r;
    }
    fit.stderr_slope = std::sqrt(rss / (k - 2.0) / denom);
  }
  return fit;
}

}  // namespace uot
