#pragma once

#include <Eigen/Core>
#include <vector>

#include "uot/measures.hpp"
#include "uot/plan_estimator.hpp"
#include "uot/solver.hpp"

namespace uot {

// Dual potentials attached to cell centers of a common grid. Cells whose
// fitted density vanished are dropped before the solve and carry no value;
// the kept flat indices are stored per side.
struct GridPotentials {
  int resolution = 0;
  int dim = 0;
  std::vector<int> phi_cells;
  Eigen::VectorXd phi;
  std::vector<int> psi_cells;
  Eigen::VectorXd psi;
};

struct KernelPairFit {
  TransportGrowthPair pair;
  GridPotentials potentials;
  double primal_value = 0.0;
  double dual_value = 0.0;
};

// Solve discrete UOT between the two grid measures (atoms at cell centers,
// weight = density * cell volume * mass) and wrap the tightened dual
// potentials as an evaluable pair:
//   T(x)      = cell center minimizing |x - y|^2/2 - psi(y), lowest flat
//               index on ties
//   a(x)^2    = exp(-phi at the nearest kept cell center)
//   lambda(x) = clip(a^2) * exp(|x - T(x)|^2 / 4)
KernelPairFit fit_kernel_pair(const GridMeasure& mu_grid,
                              const GridMeasure& nu_grid,
                              const SolverConfig& solver,
                              const ClipBounds& clip);

// Deterministic batch evaluation; one row per query.
std::vector<PairEvaluation> evaluate_pair(const TransportGrowthPair& pair,
                                          const Eigen::MatrixXd& queries);

}  // namespace uot
