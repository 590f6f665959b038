#include "uot/kernel_density.hpp"

#include <cmath>
#include <numbers>

namespace uot {

namespace {
constexpr double kPi = std::numbers::pi;

// eta(s) = e^{-1/s} for s > 0, else 0. Underflow is harmless here.
double bump_eta(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
}  // namespace

double cutoff_tau(double t) {
  if (t < 0.0) throw InvalidArgument("cutoff_tau: t must be >= 0");
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double up = bump_eta(2.0 - t);
  return up / (up + bump_eta(t - 1.0));
}

NeumannKernel::NeumannKernel(double resolution, int dim)
    : resolution_(resolution), dim_(dim) {
  if (!(resolution_ > 0.0)) {
    throw InvalidArgument("NeumannKernel: resolution must be positive");
  }
  if (dim_ < 1) throw InvalidArgument("NeumannKernel: dim must be >= 1");
  // tau vanishes once pi^2 l^2 / L^2 >= 2.
  for (int ell = 1;; ++ell) {
    const double arg = kPi * kPi * ell * ell / (resolution_ * resolution_);
    if (arg >= 2.0) break;
    const double tau = cutoff_tau(arg);
    if (tau > 0.0) modes_.push_back({ell, 2.0 * tau});
  }
}

double NeumannKernel::eval_1d(double u, double v) const {
  double acc = 1.0;
  for (const auto& mode : modes_) {
    acc += mode.multiplier * std::cos(kPi * mode.ell * u) *
           std::cos(kPi * mode.ell * v);
  }
  return acc;
}

double NeumannKernel::eval(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw DimensionMismatch("NeumannKernel: point dim mismatch");
  }
  double prod = 1.0;
  for (int axis = 0; axis < dim_; ++axis) {
    prod *= eval_1d(x[axis], y[axis]);
  }
  return prod;
}

KernelDensity::KernelDensity(Eigen::MatrixXd samples, double resolution)
    : samples_(std::move(samples)),
      kernel_(resolution, static_cast<int>(samples_.cols())) {
  if (samples_.rows() == 0) throw EmptySample("fit_density: no samples");
}

double KernelDensity::operator()(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
    acc += kernel_.eval(x, samples_.row(i).transpose());
  }
  return acc / static_cast<double>(samples_.rows());
}

KernelDensity fit_density(const Eigen::MatrixXd& samples, double resolution) {
  return KernelDensity(samples, resolution);
}

GridMeasure renormalize_positive(
    const std::function<double(const Eigen::VectorXd&)>& raw_density, int dim,
    int resolution, const MassEstimate& mass) {
  if (resolution < 2) throw InvalidArgument("resolution must be >= 2");
  if (!mass.valid()) {
    throw InvalidArgument("renormalize_positive: invalid mass estimate");
  }
  const auto cells =
      static_cast<int>(std::llround(std::pow(resolution, dim)));
  Eigen::VectorXd values(cells);
  Eigen::VectorXd x(dim);
  for (int flat = 0; flat < cells; ++flat) {
    int rem = flat;
    for (int axis = dim - 1; axis >= 0; --axis) {
      const int k = rem % resolution;
      rem /= resolution;
      x[axis] = (k + 0.5) / resolution;
    }
    values[flat] = std::max(raw_density(x), 0.0);
  }
  const double volume = std::pow(1.0 / resolution, dim);
  const double integral = values.sum() * volume;
  if (integral <= 1e-12) {
    throw DegenerateDensity(
        "renormalize_positive: positive part integrates to zero");
  }
  values /= integral;
  return GridMeasure(resolution, dim, std::move(values), mass.value);
}

double resolution_rule(int n, int dim, double alpha, double l0, int n0) {
  if (n < 1 || n0 < 1) throw InvalidArgument("resolution_rule: n, n0 >= 1");
  if (!(alpha > 1.0)) throw InvalidArgument("resolution_rule: alpha > 1");
  if (!(l0 > 0.0)) throw InvalidArgument("resolution_rule: L0 > 0");
  const double exponent = 1.0 / (dim + 2.0 * (alpha - 1.0));
  return l0 * std::pow(static_cast<double>(n) / n0, exponent);
}

}  // namespace uot
