#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>

#include "uot/errors.hpp"
#include "uot/measures.hpp"

namespace uot {

// Epsilon-annealed log-domain scaling solver for the KL-penalized
// Kantorovich problem with cost |x-y|^2/2 and unit penalty weight on both
// marginals. Levels run eps_init * eps_decay^k down to eps_final; each
// level iterates the damped softmin updates (contraction 1/(1+eps)) until
// the dual variables move less than fixed_point_tol in sup norm.
struct SolverConfig {
  double eps_init = 1.0;
  double eps_final = 1e-3;
  double eps_decay = 0.5;
  int max_iters_per_eps = 2000;
  double fixed_point_tol = 1e-9;
};

// C_ij = |x_i - y_j|^2 / 2.
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& xs,
                            const Eigen::MatrixXd& ys);

struct TransportPlan {
  Eigen::MatrixXd gamma;           // n x m, nonnegative
  Eigen::VectorXd row_marginals;   // (G_0)_i
  Eigen::VectorXd col_marginals;   // (G_1)_j

  double total_mass() const { return row_marginals.sum(); }
  static TransportPlan from_matrix(Eigen::MatrixXd gamma);
};

struct DualPotentials {
  Eigen::VectorXd phi;  // source side
  Eigen::VectorXd psi;  // target side
};

struct SolveResult {
  TransportPlan plan;
  DualPotentials potentials;  // dual-feasible after c-transform tightening
  double primal_value = 0.0;  // unregularized objective at the plan
  double dual_value = 0.0;    // sum (1-e^-phi) dmu + (1-e^-psi) dnu
  double eps_final = 0.0;     // epsilon the plan was produced at
  int iterations = 0;         // total inner iterations across levels
};

SolveResult solve_discrete_uot(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const SolverConfig& config = {});

// Which side the input potentials live on.
enum class CostSide { Source, Target };

// Exact discrete c-transform. side names the side of `values`:
//   Target: phi_i = min_j (C_ij - psi_j)
//   Source: psi_j = min_i (C_ij - phi_i)
// Ties take the lowest index (min with strict improvement).
Eigen::VectorXd c_transform(const Eigen::VectorXd& values,
                            const Eigen::MatrixXd& cost, CostSide side);

double dual_objective(const DualPotentials& potentials,
                      const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Generalized KL between nonnegative weight vectors:
// sum_i [eta_i log(eta_i/ref_i) - eta_i + ref_i], with 0 log 0 = 0.
double kl_divergence(const Eigen::VectorXd& eta_weights,
                     const Eigen::VectorXd& ref_weights);

// Exact algebraic decomposition of the duality excess against a feasible
// oracle pair:
//   lhs = primal(plan) - dual(oracle)
//       = slack + KL(row | e^-phi mu) + KL(col | e^-psi nu).
struct ExcessDecomposition {
  double slack = 0.0;
  double kl_row = 0.0;
  double kl_col = 0.0;
  double lhs = 0.0;
};

ExcessDecomposition excess_decomposition(const TransportPlan& plan,
                                         const DualPotentials& oracle,
                                         const Eigen::MatrixXd& cost,
                                         const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu);

// Diagnostic for the curvature gap bound: returns
//   max over pairs of (kappa/2)|y_j - T0(x_i)|^2 - (C_ij - phi_i - psi_j).
// Nonpositive when the oracle satisfies the strong-convexity assumption.
double verify_gap_lower_bound(const DualPotentials& oracle,
                              const Eigen::MatrixXd& t0_values,
                              const Eigen::MatrixXd& xs,
                              const Eigen::MatrixXd& ys, double kappa,
                              std::span<const std::pair<int, int>> pairs);

}  // namespace uot
