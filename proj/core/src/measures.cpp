#include "uot/measures.hpp"

#include <cmath>
#include <numbers>

#include "uot/rng.hpp"

namespace uot {

namespace {
constexpr double kPi = std::numbers::pi;

double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points,
                                 Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0) {
    throw EmptySample("DiscreteMeasure requires at least one atom");
  }
  if (points_.rows() != weights_.size()) {
    throw DimensionMismatch("points and weights length differ");
  }
  if ((points_.array() < 0.0).any() || (points_.array() > 1.0).any()) {
    throw InvalidArgument("support point outside [0,1]^d");
  }
  if ((weights_.array() <= 0.0).any() || !weights_.allFinite()) {
    throw InvalidArgument("weights must be strictly positive and finite");
  }
  total_mass_ = weights_.sum();
}

GridMeasure::GridMeasure(int resolution, int dim, Eigen::VectorXd density,
                         double mass)
    : resolution_(resolution),
      dim_(dim),
      density_(std::move(density)),
      mass_(mass) {
  if (resolution_ < 2) throw InvalidArgument("grid resolution must be >= 2");
  if (dim_ < 1) throw InvalidArgument("grid dim must be >= 1");
  double cells = std::pow(static_cast<double>(resolution_), dim_);
  if (static_cast<double>(density_.size()) != cells) {
    throw DimensionMismatch("density length differs from resolution^dim");
  }
  if ((density_.array() < 0.0).any() || !density_.allFinite()) {
    throw InvalidArgument("grid density must be nonnegative and finite");
  }
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
    throw InvalidArgument("grid mass must be positive");
  }
  cell_volume_ = std::pow(1.0 / resolution_, dim_);
  double integral = density_.sum() * cell_volume_;
  if (std::abs(integral - 1.0) > 1e-10) {
    throw InvalidArgument("grid density must integrate to one");
  }
}

Eigen::VectorXd GridMeasure::cell_center(int flat_index) const {
  Eigen::VectorXd x(dim_);
  int rem = flat_index;
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    int k = rem % resolution_;
    rem /= resolution_;
    x[axis] = (k + 0.5) / resolution_;
  }
  return x;
}

SyntheticDensity::SyntheticDensity(DensityKind kind, double c, int dim)
    : kind_(kind), c_(c), dim_(dim) {
  if (dim_ < 1) throw InvalidArgument("density dim must be >= 1");
}

SyntheticDensity SyntheticDensity::sine_shift(double c, int dim) {
  if (!(c > 0.0 && c < 1.0)) {
    throw InvalidArgument("sine shift c must lie in (0,1)");
  }
  return SyntheticDensity(DensityKind::SineShift, c, dim);
}

SyntheticDensity SyntheticDensity::uniform(int dim) {
  return SyntheticDensity(DensityKind::Uniform, 0.0, dim);
}

double SyntheticDensity::pdf(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw DimensionMismatch("pdf point dim mismatch");
  if (kind_ == DensityKind::Uniform) return 1.0;
  double p = 1.0;
  for (int i = 0; i < dim_; ++i) {
    p *= 0.5 * kPi * std::abs(std::sin(kPi * (x[i] - c_)));
  }
  return p;
}

// |sin pi(x-c)| vanishes at x = c only (for c in (0,1)), so the CDF has two
// smooth pieces with antiderivative cos/2 on each.
double SyntheticDensity::cdf_1d(double x) const {
  if (kind_ == DensityKind::Uniform) return std::min(1.0, std::max(0.0, x));
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x <= c_) {
    return 0.5 * (std::cos(kPi * (c_ - x)) - std::cos(kPi * c_));
  }
  double at_c = 0.5 * (1.0 - std::cos(kPi * c_));
  return at_c + 0.5 * (1.0 - std::cos(kPi * (x - c_)));
}

double SyntheticDensity::quantile_1d(double u) const {
  if (kind_ == DensityKind::Uniform) return u;
  double at_c = 0.5 * (1.0 - std::cos(kPi * c_));
  if (u <= at_c) {
    return c_ - std::acos(clamp_unit(2.0 * u + std::cos(kPi * c_))) / kPi;
  }
  return c_ + std::acos(clamp_unit(1.0 - 2.0 * (u - at_c))) / kPi;
}

Eigen::MatrixXd sample_iid(const SyntheticDensity& density, int n,
                           std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
  Rng rng(seed);
  const int d = density.dim();
  Eigen::MatrixXd points(n, d);
  for (int i = 0; i < n; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      points(i, axis) = density.quantile_1d(rng.uniform());
    }
  }
  return points;
}

std::pair<Eigen::MatrixXd, MassEstimate> sample_ppp(
    const SyntheticDensity& density, double mass, std::uint64_t seed) {
  if (!(mass > 0.0)) throw InvalidArgument("ppp mass must be positive");
  Rng rng(seed);
  const std::int64_t count = rng.poisson(mass);
  const int d = density.dim();
  Eigen::MatrixXd points(count, d);
  for (std::int64_t i = 0; i < count; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      points(i, axis) = density.quantile_1d(rng.uniform());
    }
  }
  return {std::move(points), MassEstimate::poisson_count(count)};
}

MassEstimate MassEstimate::known(double v) {
  if (!(v > 0.0)) throw InvalidArgument("known mass must be positive");
  return {v, MassSource::Known};
}

MassEstimate MassEstimate::external(double v) {
  if (!(v > 0.0)) throw InvalidArgument("external mass must be positive");
  return {v, MassSource::External};
}

MassEstimate MassEstimate::poisson_count(std::int64_t n) {
  if (n < 0) throw InvalidArgument("poisson count must be nonnegative");
  return {static_cast<double>(n), MassSource::PoissonCount};
}

DiscreteMeasure weighted_empirical(const Eigen::MatrixXd& points,
                                   const MassEstimate& mass_estimate) {
  if (points.rows() == 0) throw EmptySample("weighted_empirical: no points");
  if (!mass_estimate.valid()) {
    throw InvalidArgument("weighted_empirical: invalid mass estimate");
  }
  const int n = static_cast<int>(points.rows());
  Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(n, mass_estimate.value / n);
  return DiscreteMeasure(points, std::move(weights));
}

GridMeasure density_to_grid(const SyntheticDensity& density, double mass,
                            int resolution) {
  if (resolution < 2) throw InvalidArgument("resolution must be >= 2");
  const int d = density.dim();
  const auto cells =
      static_cast<int>(std::llround(std::pow(resolution, d)));
  Eigen::VectorXd values(cells);
  // Reuse GridMeasure flat indexing for the centers.
  Eigen::VectorXd x(d);
  for (int flat = 0; flat < cells; ++flat) {
    int rem = flat;
    for (int axis = d - 1; axis >= 0; --axis) {
      int k = rem % resolution;
      rem /= resolution;
      x[axis] = (k + 0.5) / resolution;
    }
    values[flat] = density.pdf(x);
  }
  const double volume = std::pow(1.0 / resolution, d);
  values /= values.sum() * volume;
  return GridMeasure(resolution, d, std::move(values), mass);
}

}  // namespace uot
