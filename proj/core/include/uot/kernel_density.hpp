#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "uot/errors.hpp"
#include "uot/measures.hpp"

namespace uot {

// Smooth spectral cutoff: 1 on [0,1], 0 on [2,inf), C-infinity in between
// via the bump quotient e^{-1/(2-t)} / (e^{-1/(2-t)} + e^{-1/(t-1)}).
double cutoff_tau(double t);

// Boundary-adapted separable cosine kernel on [0,1]^d built from Neumann
// Laplacian eigenfunctions. Per axis:
//   kappa_L(u,v) = 1 + sum_l tau(pi^2 l^2 / L^2) * 2 cos(pi l u) cos(pi l v)
// The cutoff keeps only l < L*sqrt(2)/pi modes, cached at construction, so
// one evaluation costs O(d * L). For every u, the kernel integrates to one
// in v.
class NeumannKernel {
 public:
  struct Mode {
    int ell;
    double multiplier;  // tau(pi^2 l^2 / L^2) * 2
  };

  NeumannKernel(double resolution, int dim);

  double resolution() const { return resolution_; }
  int dim() const { return dim_; }
  const std::vector<Mode>& modes() const { return modes_; }

  double eval_1d(double u, double v) const;
  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  double resolution_;
  int dim_;
  std::vector<Mode> modes_;
};

// Raw (signed) kernel density estimate: mean of K_L(x, X_i) over samples.
class KernelDensity {
 public:
  KernelDensity(Eigen::MatrixXd samples, double resolution);

  double operator()(const Eigen::VectorXd& x) const;
  const NeumannKernel& kernel() const { return kernel_; }
  int sample_count() const { return static_cast<int>(samples_.rows()); }

 private:
  Eigen::MatrixXd samples_;
  NeumannKernel kernel_;
};

KernelDensity fit_density(const Eigen::MatrixXd& samples, double resolution);

// Cell-center evaluation of a raw density with negatives clipped to zero,
// renormalized to unit integral, with the estimated mass attached.
GridMeasure renormalize_positive(
    const std::function<double(const Eigen::VectorXd&)>& raw_density, int dim,
    int resolution, const MassEstimate& mass);

// Anchor-scaled bandwidth rule L = L0 * (n/n0)^{1/(d + 2(alpha-1))}.
double resolution_rule(int n, int dim, double alpha, double l0, int n0);

}  // namespace uot
