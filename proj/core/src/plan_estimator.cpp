#include "uot/plan_estimator.hpp"

#include <cmath>

namespace uot {

TransportGrowthPair::TransportGrowthPair(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

PairEvaluation TransportGrowthPair::evaluate(
    const Eigen::VectorXd& query) const {
  if (query.size() != impl_->dim()) {
    throw DimensionMismatch("TransportGrowthPair: query dim mismatch");
  }
  return impl_->evaluate(query);
}

PairBacking TransportGrowthPair::backing() const { return impl_->backing(); }
int TransportGrowthPair::dim() const { return impl_->dim(); }

namespace {

int nearest_source(const Eigen::MatrixXd& points,
                   const Eigen::VectorXd& query) {
  int best = 0;
  double best_sq = (points.row(0).transpose() - query).squaredNorm();
  for (int i = 1; i < points.rows(); ++i) {
    const double sq = (points.row(i).transpose() - query).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

class OneNNImpl final : public TransportGrowthPair::Impl {
 public:
  OneNNImpl(RowEstimates rows, Eigen::MatrixXd source_points)
      : rows_(std::move(rows)), source_(std::move(source_points)) {}

  PairEvaluation evaluate(const Eigen::VectorXd& query) const override {
    const int i = nearest_source(source_, query);
    return {rows_.t_hat.row(i).transpose(), rows_.lambda_hat[i], rows_.a_hat[i]};
  }

  PairBacking backing() const override { return PairBacking::OneNN; }
  int dim() const override { return static_cast<int>(source_.cols()); }

 private:
  RowEstimates rows_;
  Eigen::MatrixXd source_;
};

class NadarayaWatsonImpl final : public TransportGrowthPair::Impl {
 public:
  NadarayaWatsonImpl(RowEstimates rows, Eigen::MatrixXd source_points,
                     SmoothingKernel kernel, double bandwidth)
      : rows_(std::move(rows)),
        source_(std::move(source_points)),
        kernel_(kernel),
        bandwidth_(bandwidth) {}

  PairEvaluation evaluate(const Eigen::VectorXd& query) const override {
    const int n = static_cast<int>(source_.rows());
    Eigen::VectorXd weights(n);
    double denom = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sq =
          (source_.row(i).transpose() - query).squaredNorm() /
          (bandwidth_ * bandwidth_);
      const double w = kernel_ == SmoothingKernel::Gaussian
                           ? std::exp(-0.5 * sq)
                           : std::max(0.0, 1.0 - sq);
      weights[i] = w;
      denom += w;
    }
    if (denom <= 0.0) {
      // All kernel weights vanished: piecewise-constant fallback.
      const int i = nearest_source(source_, query);
      return {rows_.t_hat.row(i).transpose(), rows_.lambda_hat[i], rows_.a_hat[i]};
    }
    weights /= denom;
    PairEvaluation out;
    out.target = rows_.t_hat.transpose() * weights;
    out.lambda = rows_.lambda_hat.dot(weights);
    out.a = rows_.a_hat.dot(weights);
    return out;
  }

  PairBacking backing() const override {
    return PairBacking::NadarayaWatson;
  }
  int dim() const override { return static_cast<int>(source_.cols()); }

 private:
  RowEstimates rows_;
  Eigen::MatrixXd source_;
  SmoothingKernel kernel_;
  double bandwidth_;
};

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> barycentric_rows(
    const TransportPlan& plan, const Eigen::MatrixXd& source_points,
    const Eigen::MatrixXd& target_points) {
  if (plan.gamma.rows() != source_points.rows() ||
      plan.gamma.cols() != target_points.rows()) {
    throw DimensionMismatch("barycentric_rows: plan shape mismatch");
  }
  const int n = static_cast<int>(source_points.rows());
  Eigen::VectorXd r_hat = plan.row_marginals;
  Eigen::MatrixXd t_hat(n, source_points.cols());
  for (int i = 0; i < n; ++i) {
    if (r_hat[i] > 0.0) {
      t_hat.row(i) = (plan.gamma.row(i) * target_points) / r_hat[i];
    } else {
      t_hat.row(i) = source_points.row(i);
    }
  }
  return {std::move(t_hat), std::move(r_hat)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> growth_from_rows(
    const Eigen::VectorXd& r_hat, const Eigen::VectorXd& mu_weights,
    const Eigen::MatrixXd& t_hat, const Eigen::MatrixXd& source_points,
    const ClipBounds& clip) {
  if (!(clip.w_minus > 0.0 && clip.w_minus < clip.w_plus)) {
    throw InvalidArgument("growth_from_rows: need 0 < w_minus < w_plus");
  }
  if ((mu_weights.array() <= 0.0).any()) {
    throw NegativeWeight("growth_from_rows: mu weights must be positive");
  }
  if (r_hat.size() != mu_weights.size() || t_hat.rows() != r_hat.size() ||
      source_points.rows() != r_hat.size()) {
    throw DimensionMismatch("growth_from_rows: length mismatch");
  }
  const int n = static_cast<int>(r_hat.size());
  Eigen::VectorXd a_hat(n), lambda_hat(n);
  for (int i = 0; i < n; ++i) {
    a_hat[i] = std::sqrt(r_hat[i] / mu_weights[i]);
    const double clipped =
        std::clamp(a_hat[i] * a_hat[i], clip.w_minus, clip.w_plus);
    const double sq = (source_points.row(i) - t_hat.row(i)).squaredNorm();
    lambda_hat[i] = clipped * std::exp(0.25 * sq);
  }
  return {std::move(a_hat), std::move(lambda_hat)};
}

namespace {

void validate_rows(const RowEstimates& rows,
                   const Eigen::MatrixXd& source_points) {
  const auto n = source_points.rows();
  if (n == 0) throw EmptySample("extend: empty source sample");
  if (rows.t_hat.rows() != n || rows.r_hat.size() != n ||
      rows.a_hat.size() != n || rows.lambda_hat.size() != n ||
      rows.t_hat.cols() != source_points.cols()) {
    throw DimensionMismatch("extend: row estimates shape mismatch");
  }
}

}  // namespace

TransportGrowthPair extend_1nn(RowEstimates rows,
                               Eigen::MatrixXd source_points) {
  validate_rows(rows, source_points);
  return TransportGrowthPair(std::make_shared<OneNNImpl>(
      std::move(rows), std::move(source_points)));
}

TransportGrowthPair extend_nw(RowEstimates rows,
                              Eigen::MatrixXd source_points,
                              SmoothingKernel kernel, double bandwidth) {
  validate_rows(rows, source_points);
  if (!(bandwidth > 0.0)) {
    throw InvalidArgument("extend_nw: bandwidth must be positive");
  }
  return TransportGrowthPair(std::make_shared<NadarayaWatsonImpl>(
      std::move(rows), std::move(source_points), kernel, bandwidth));
}

}  // namespace uot
