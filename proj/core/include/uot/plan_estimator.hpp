#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "uot/errors.hpp"
#include "uot/solver.hpp"

namespace uot {

// Clipping window for the squared active-source factor. The exponential
// distance factor is never clipped.
struct ClipBounds {
  double w_minus = 1e-3;
  double w_plus = 1e3;
};

// Per-sample estimates extracted from a discrete plan: barycentric targets,
// row masses, active-source factors and clipped growth values.
struct RowEstimates {
  Eigen::MatrixXd t_hat;       // n x d
  Eigen::VectorXd r_hat;       // row masses
  Eigen::VectorXd a_hat;       // sqrt(r_hat / mu_weights)
  Eigen::VectorXd lambda_hat;  // clip(a^2) * exp(|x - T|^2 / 4)
};

struct PairEvaluation {
  Eigen::VectorXd target;
  double lambda = 0.0;
  double a = 0.0;
};

enum class PairBacking { OneNN, NadarayaWatson, GridPotentials };

// Evaluable transport-growth pair (T, lambda) on [0,1]^d. Immutable and
// cheap to copy; evaluation is pure and reentrant.
class TransportGrowthPair {
 public:
  // Extension point shared by the 1NN, Nadaraya-Watson and grid-potential
  // backings.
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual PairEvaluation evaluate(const Eigen::VectorXd& query) const = 0;
    virtual PairBacking backing() const = 0;
    virtual int dim() const = 0;
  };

  explicit TransportGrowthPair(std::shared_ptr<const Impl> impl);

  PairEvaluation evaluate(const Eigen::VectorXd& query) const;
  PairBacking backing() const;
  int dim() const;

 private:
  std::shared_ptr<const Impl> impl_;
};

// Barycentric (Frechet) projection of each plan row onto the target
// support; zero rows fall back to the source point itself.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> barycentric_rows(
    const TransportPlan& plan, const Eigen::MatrixXd& source_points,
    const Eigen::MatrixXd& target_points);

// a_i = sqrt(r_i / mu_i); lambda_i = clip(a_i^2) * exp(|X_i - T_i|^2 / 4).
std::pair<Eigen::VectorXd, Eigen::VectorXd> growth_from_rows(
    const Eigen::VectorXd& r_hat, const Eigen::VectorXd& mu_weights,
    const Eigen::MatrixXd& t_hat, const Eigen::MatrixXd& source_points,
    const ClipBounds& clip);

// Piecewise-constant extension over the Voronoi partition of the source
// sample. Cells are never materialized; each query is a linear scan with
// lowest-index tie-breaking.
TransportGrowthPair extend_1nn(RowEstimates rows,
                               Eigen::MatrixXd source_points);

enum class SmoothingKernel { Gaussian, Epanechnikov };

// Nadaraya-Watson smoothing of the row estimates. If every kernel weight
// underflows to zero at a query, falls back to the 1NN value there.
TransportGrowthPair extend_nw(RowEstimates rows,
                              Eigen::MatrixXd source_points,
                              SmoothingKernel kernel, double bandwidth);

}  // namespace uot
