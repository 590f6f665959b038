#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

#include "uot/errors.hpp"

namespace uot {

// Finite atomic measure on [0,1]^d. Row i of points() is the i-th atom.
// Construction validates: equal lengths, n >= 1, coordinates inside the
// cube, strictly positive weights. Out-of-cube points are rejected, not
// clamped.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  int dim() const { return static_cast<int>(points_.cols()); }
  int size() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  Eigen::VectorXd point(int i) const { return points_.row(i); }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  double total_mass_;
};

// Uniform R^d grid over [0,1]^d holding a normalized density sampled at
// cell centers (sum * cell_volume == 1 within 1e-10) plus a separately
// stored total mass. Flat indexing is row-major with axis 0 slowest.
class GridMeasure {
 public:
  GridMeasure(int resolution, int dim, Eigen::VectorXd density, double mass);

  int resolution() const { return resolution_; }
  int dim() const { return dim_; }
  const Eigen::VectorXd& density() const { return density_; }
  double mass() const { return mass_; }
  int size() const { return static_cast<int>(density_.size()); }
  double cell_volume() const { return cell_volume_; }
  Eigen::VectorXd cell_center(int flat_index) const;
  // Atom weight of cell c when viewed as a discrete measure:
  // density[c] * cell_volume * mass.
  double cell_weight(int flat_index) const {
    return density_[flat_index] * cell_volume_ * mass_;
  }

 private:
  int resolution_;
  int dim_;
  Eigen::VectorXd density_;
  double mass_;
  double cell_volume_;
};

enum class DensityKind { SineShift, Uniform };

// The two synthetic benchmark densities on [0,1]^d. SineShift(c) is the
// product density prod_i (pi/2)|sin pi(x_i - c)|, which integrates to one.
class SyntheticDensity {
 public:
  static SyntheticDensity sine_shift(double c, int dim);
  static SyntheticDensity uniform(int dim);

  DensityKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double shift() const { return c_; }

  double pdf(const Eigen::VectorXd& x) const;
  // Per-axis marginal CDF and its exact inverse (closed form via arccos).
  double cdf_1d(double x) const;
  double quantile_1d(double u) const;

 private:
  SyntheticDensity(DensityKind kind, double c, int dim);
  DensityKind kind_;
  double c_;
  int dim_;
};

enum class MassSource { Known, PoissonCount, External };

struct MassEstimate {
  double value = 0.0;
  MassSource source = MassSource::Known;

  bool valid() const { return value > 0.0; }

  static MassEstimate known(double v);
  static MassEstimate external(double v);
  static MassEstimate poisson_count(std::int64_t n);
};

// n i.i.d. draws from the normalized density; exact inverse-CDF per axis.
Eigen::MatrixXd sample_iid(const SyntheticDensity& density, int n,
                           std::uint64_t seed);

// Poisson point process with intensity mass * density: N ~ Poisson(mass),
// then N i.i.d. points. The realized count is the mass estimate. N == 0
// yields an empty sample and an invalid estimate.
std::pair<Eigen::MatrixXd, MassEstimate> sample_ppp(
    const SyntheticDensity& density, double mass, std::uint64_t seed);

// Atomic measure with every weight equal to mass / n.
DiscreteMeasure weighted_empirical(const Eigen::MatrixXd& points,
                                   const MassEstimate& mass_estimate);

// Cell-center evaluation of the density, renormalized to unit integral.
GridMeasure density_to_grid(const SyntheticDensity& density, double mass,
                            int resolution);

}  // namespace uot
