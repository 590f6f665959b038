#include "uot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace uot {

namespace {

// Plan entries whose log falls below this are flushed to exactly zero.
constexpr double kLogFlush = -690.77552789821368;  // log(1e-300)

// Log-sum-exp of (values + offsets) over a vector, max-shifted.
double lse(const Eigen::ArrayXd& a) {
  const double m = a.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((a - m).exp().sum());
}

void validate_config(const SolverConfig& c) {
  if (!(c.eps_init > 0.0) || !(c.eps_final > 0.0) ||
      c.eps_final > c.eps_init) {
    throw InvalidArgument("solver: need 0 < eps_final <= eps_init");
  }
  if (!(c.eps_decay > 0.0 && c.eps_decay < 1.0)) {
    throw InvalidArgument("solver: eps_decay must be in (0,1)");
  }
  if (c.max_iters_per_eps < 1) {
    throw InvalidArgument("solver: max_iters_per_eps must be >= 1");
  }
  if (!(c.fixed_point_tol > 0.0)) {
    throw InvalidArgument("solver: fixed_point_tol must be positive");
  }
}

}  // namespace

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& xs,
                            const Eigen::MatrixXd& ys) {
  if (xs.cols() != ys.cols()) {
    throw DimensionMismatch("cost_matrix: point dimensions differ");
  }
  const auto n = xs.rows();
  const auto m = ys.rows();
  const auto d = xs.cols();
  Eigen::MatrixXd cost(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = xs(i, k) - ys(j, k);
        acc += diff * diff;
      }
      cost(i, j) = 0.5 * acc;
    }
  }
  return cost;
}

TransportPlan TransportPlan::from_matrix(Eigen::MatrixXd gamma) {
  if ((gamma.array() < 0.0).any() || !gamma.allFinite()) {
    throw InvalidArgument("transport plan must be nonnegative and finite");
  }
  TransportPlan plan;
  plan.row_marginals = gamma.rowwise().sum();
  plan.col_marginals = gamma.colwise().sum();
  plan.gamma = std::move(gamma);
  return plan;
}

Eigen::VectorXd c_transform(const Eigen::VectorXd& values,
                            const Eigen::MatrixXd& cost, CostSide side) {
  if (!values.allFinite()) {
    throw InvalidArgument("c_transform: potentials must be finite");
  }
  if (side == CostSide::Target) {
    if (values.size() != cost.cols()) {
      throw DimensionMismatch("c_transform: psi length != cost columns");
    }
    return (cost.rowwise() - values.transpose()).rowwise().minCoeff();
  }
  if (values.size() != cost.rows()) {
    throw DimensionMismatch("c_transform: phi length != cost rows");
  }
  return (cost.colwise() - values).colwise().minCoeff().transpose();
}

double dual_objective(const DualPotentials& potentials,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (potentials.phi.size() != mu.size() ||
      potentials.psi.size() != nu.size()) {
    throw DimensionMismatch("dual_objective: potential lengths mismatch");
  }
  const double source =
      (mu.weights().array() * (1.0 - (-potentials.phi.array()).exp())).sum();
  const double target =
      (nu.weights().array() * (1.0 - (-potentials.psi.array()).exp())).sum();
  return source + target;
}

double kl_divergence(const Eigen::VectorXd& eta_weights,
                     const Eigen::VectorXd& ref_weights) {
  if (eta_weights.size() != ref_weights.size()) {
    throw DimensionMismatch("kl_divergence: length mismatch");
  }
  if ((ref_weights.array() <= 0.0).any()) {
    throw NegativeWeight("kl_divergence: reference weights must be positive");
  }
  if ((eta_weights.array() < 0.0).any()) {
    throw NegativeWeight("kl_divergence: eta weights must be nonnegative");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta_weights.size(); ++i) {
    const double eta = eta_weights[i];
    const double ref = ref_weights[i];
    if (eta == 0.0) {
      sum += ref;  // 0 log 0 := 0
    } else {
      sum += eta * std::log(eta / ref) - eta + ref;
    }
  }
  return std::max(sum, 0.0);
}

namespace {

double primal_objective(const TransportPlan& plan, const Eigen::MatrixXd& cost,
                        const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const double transport = (cost.array() * plan.gamma.array()).sum();
  return transport + kl_divergence(plan.row_marginals, mu.weights()) +
         kl_divergence(plan.col_marginals, nu.weights());
}

}  // namespace

SolveResult solve_discrete_uot(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const SolverConfig& config) {
  validate_config(config);
  if (mu.dim() != nu.dim()) {
    throw DimensionMismatch("solve_discrete_uot: measure dims differ");
  }
  const auto n = mu.size();
  const auto m = nu.size();
  const Eigen::MatrixXd cost = cost_matrix(mu.points(), nu.points());
  const Eigen::ArrayXd log_mu = mu.weights().array().log();
  const Eigen::ArrayXd log_nu = nu.weights().array().log();

  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd g = Eigen::ArrayXd::Zero(m);
  Eigen::ArrayXd f_old(n), g_old(m), row_stat(n), col_stat(m);
  Eigen::ArrayXd scratch_n(n), scratch_m(m);
  Eigen::ArrayXd df(n), dg(m), df_prev(n), dg_prev(m);

  // Epsilon ladder: eps_init * decay^k, clamped to end exactly at eps_final.
  std::vector<double> levels;
  for (double eps = config.eps_init; eps > config.eps_final * (1.0 + 1e-12);
       eps *= config.eps_decay) {
    levels.push_back(eps);
  }
  levels.push_back(config.eps_final);

  int total_iters = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const double eps = levels[level];
    const double damp = 1.0 / (1.0 + eps);
    // Column-major copies oriented so both half-updates sweep contiguous
    // columns that stay cache-resident across the max and exp passes.
    const Eigen::ArrayXXd lcost = cost.array() / eps;          // n x m
    const Eigen::ArrayXXd lcost_t = lcost.transpose().eval();  // m x n
    bool converged = false;
    bool have_prev_delta = false;
    for (int iter = 0; iter < config.max_iters_per_eps; ++iter) {
      ++total_iters;
      f_old = f;
      g_old = g;

      // Softmin update of f given g (exact coordinate minimization).
      col_stat = g / eps + log_nu;
      for (Eigen::Index i = 0; i < n; ++i) {
        scratch_m = col_stat - lcost_t.col(i);
        const double peak = scratch_m.maxCoeff();
        f[i] = -eps * damp *
               (peak + std::log((scratch_m - peak).exp().sum()));
      }

      // Softmin update of g given f.
      row_stat = f / eps + log_mu;
      for (Eigen::Index j = 0; j < m; ++j) {
        scratch_n = row_stat - lcost.col(j);
        const double peak = scratch_n.maxCoeff();
        g[j] = -eps * damp *
               (peak + std::log((scratch_n - peak).exp().sum()));
      }

      // Exact minimization over constant shifts (f+s, g+t). The softmin
      // Jacobians are row-stochastic, so the constant direction is the
      // slowest eigenmode of the damped map; solving it in closed form
      // removes that mode every iteration. Right after the g-update the
      // identity sum_j e^-g nu_j = gamma(Omega^2) holds exactly, which
      // collapses the joint shift equations to the two log marginal
      // defects below.
      const double log_a = lse(log_mu - f);
      const double log_b = lse(log_nu - g);
      const double shift_f = (1.0 + eps) / (2.0 + eps) * (log_a - log_b);
      const double shift_g = (log_b - log_a) / (2.0 + eps);
      f += shift_f;
      g += shift_g;

      df = f - f_old;
      dg = g - g_old;
      double change =
          std::max(df.abs().maxCoeff(), dg.abs().maxCoeff());

      // Aitken extrapolation on the dominant geometric tail: when two
      // consecutive plain deltas are parallel with ratio rho, the remaining
      // distance to the fixed point is delta * rho/(1-rho). The map stays a
      // contraction, so an occasional poor jump is self-correcting.
      if (have_prev_delta && change >= config.fixed_point_tol) {
        const double den =
            df_prev.square().sum() + dg_prev.square().sum();
        const double num = (df * df_prev).sum() + (dg * dg_prev).sum();
        const double rho = den > 0.0 ? num / den : 0.0;
        if (rho > 0.1 && rho < 0.9999) {
          const double amp = std::min(rho / (1.0 - rho), 1e4);
          f += amp * df;
          g += amp * dg;
          change = std::max(change, amp * change);
          have_prev_delta = false;
        } else {
          df_prev = df;
          dg_prev = dg;
        }
      } else {
        df_prev = df;
        dg_prev = dg;
        have_prev_delta = true;
      }

      residual = change;
      if (change < config.fixed_point_tol) {
        converged = true;
        break;
      }
    }
    if (!converged && level + 1 == levels.size()) {
      throw NonConvergence(
          "solve_discrete_uot: fixed point not reached at eps_final "
          "(residual " +
              std::to_string(residual) + ")",
          residual);
    }
  }

  const double eps = levels.back();
  // gamma_ij = exp((f_i + g_j - C_ij)/eps) mu_i nu_j, flushed below 1e-300.
  Eigen::ArrayXXd work =
      (cost.array() / -eps).rowwise() + (g / eps + log_nu).transpose();
  work.colwise() += f / eps + log_mu;
  Eigen::MatrixXd gamma =
      (work < kLogFlush).select(0.0, work.exp()).matrix();

  SolveResult result;
  result.plan = TransportPlan::from_matrix(std::move(gamma));
  Eigen::VectorXd psi = c_transform(f.matrix(), cost, CostSide::Source);
  Eigen::VectorXd phi = c_transform(psi, cost, CostSide::Target);
  result.potentials = DualPotentials{std::move(phi), std::move(psi)};
  result.primal_value = primal_objective(result.plan, cost, mu, nu);
  result.dual_value = dual_objective(result.potentials, mu, nu);
  result.eps_final = eps;
  result.iterations = total_iters;
  return result;
}

ExcessDecomposition excess_decomposition(const TransportPlan& plan,
                                         const DualPotentials& oracle,
                                         const Eigen::MatrixXd& cost,
                                         const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu) {
  if (plan.gamma.rows() != mu.size() || plan.gamma.cols() != nu.size() ||
      oracle.phi.size() != mu.size() || oracle.psi.size() != nu.size()) {
    throw DimensionMismatch("excess_decomposition: shape mismatch");
  }
  const Eigen::MatrixXd gap =
      (cost.rowwise() - oracle.psi.transpose()).colwise() - oracle.phi;
  if (gap.minCoeff() < -1e-9) {
    throw InfeasibleOracle("excess_decomposition: oracle violates "
                           "phi + psi <= cost beyond 1e-9");
  }
  ExcessDecomposition out;
  out.slack = (plan.gamma.array() * gap.array()).sum();
  out.kl_row = kl_divergence(
      plan.row_marginals,
      ((-oracle.phi.array()).exp() * mu.weights().array()).matrix());
  out.kl_col = kl_divergence(
      plan.col_marginals,
      ((-oracle.psi.array()).exp() * nu.weights().array()).matrix());
  out.lhs = primal_objective(plan, cost, mu, nu) -
            dual_objective(oracle, mu, nu);
  return out;
}

double verify_gap_lower_bound(const DualPotentials& oracle,
                              const Eigen::MatrixXd& t0_values,
                              const Eigen::MatrixXd& xs,
                              const Eigen::MatrixXd& ys, double kappa,
                              std::span<const std::pair<int, int>> pairs) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw InvalidArgument("verify_gap_lower_bound: kappa must be in [0,1]");
  }
  if (t0_values.rows() != xs.rows() || t0_values.cols() != xs.cols()) {
    throw DimensionMismatch("verify_gap_lower_bound: T0 shape mismatch");
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : pairs) {
    const double gap = 0.5 * (xs.row(i) - ys.row(j)).squaredNorm() -
                       oracle.phi[i] - oracle.psi[j];
    const double quad =
        0.5 * kappa * (ys.row(j) - t0_values.row(i)).squaredNorm();
    worst = std::max(worst, quad - gap);
  }
  return worst;
}

}  // namespace uot
