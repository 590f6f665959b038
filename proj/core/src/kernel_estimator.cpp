#include "uot/kernel_estimator.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace uot {

namespace {

// Cell centers and atom weights of the nonzero cells.
struct GridAtoms {
  std::vector<int> cells;
  Eigen::MatrixXd centers;
  Eigen::VectorXd weights;
};

GridAtoms nonzero_atoms(const GridMeasure& grid) {
  GridAtoms atoms;
  for (int flat = 0; flat < grid.size(); ++flat) {
    if (grid.density()[flat] > 0.0) atoms.cells.push_back(flat);
  }
  if (atoms.cells.empty()) {
    throw DegenerateDensity("fit_kernel_pair: grid has no positive cells");
  }
  const int kept = static_cast<int>(atoms.cells.size());
  atoms.centers.resize(kept, grid.dim());
  atoms.weights.resize(kept);
  for (int k = 0; k < kept; ++k) {
    atoms.centers.row(k) = grid.cell_center(atoms.cells[k]).transpose();
    atoms.weights[k] = grid.cell_weight(atoms.cells[k]);
  }
  return atoms;
}

class GridPotentialImpl final : public TransportGrowthPair::Impl {
 public:
  GridPotentialImpl(GridAtoms mu_atoms, GridAtoms nu_atoms,
                    DualPotentials potentials, ClipBounds clip, int dim)
      : mu_atoms_(std::move(mu_atoms)),
        nu_atoms_(std::move(nu_atoms)),
        potentials_(std::move(potentials)),
        clip_(clip),
        dim_(dim) {}

  PairEvaluation evaluate(const Eigen::VectorXd& query) const override {
    // Gradient-free transport map: argmin over target cell centers of
    // |x - y|^2/2 - psi(y). Strict < keeps the lowest flat index on ties.
    int best = 0;
    double best_score =
        0.5 * (nu_atoms_.centers.row(0).transpose() - query).squaredNorm() -
        potentials_.psi[0];
    for (int k = 1; k < nu_atoms_.centers.rows(); ++k) {
      const double score =
          0.5 * (nu_atoms_.centers.row(k).transpose() - query).squaredNorm() -
          potentials_.psi[k];
      if (score < best_score) {
        best_score = score;
        best = k;
      }
    }
    // Piecewise-constant phi: value at the nearest kept source cell.
    int nearest = 0;
    double nearest_sq =
        (mu_atoms_.centers.row(0).transpose() - query).squaredNorm();
    for (int k = 1; k < mu_atoms_.centers.rows(); ++k) {
      const double sq =
          (mu_atoms_.centers.row(k).transpose() - query).squaredNorm();
      if (sq < nearest_sq) {
        nearest_sq = sq;
        nearest = k;
      }
    }
    PairEvaluation out;
    out.target = nu_atoms_.centers.row(best).transpose();
    const double a_sq = std::exp(-potentials_.phi[nearest]);
    out.a = std::sqrt(a_sq);
    const double clipped = std::clamp(a_sq, clip_.w_minus, clip_.w_plus);
    out.lambda =
        clipped * std::exp(0.25 * (query - out.target).squaredNorm());
    return out;
  }

  PairBacking backing() const override {
    return PairBacking::GridPotentials;
  }
  int dim() const override { return dim_; }

 private:
  GridAtoms mu_atoms_;
  GridAtoms nu_atoms_;
  DualPotentials potentials_;
  ClipBounds clip_;
  int dim_;
};

}  // namespace

KernelPairFit fit_kernel_pair(const GridMeasure& mu_grid,
                              const GridMeasure& nu_grid,
                              const SolverConfig& solver,
                              const ClipBounds& clip) {
  if (mu_grid.dim() != nu_grid.dim() ||
      mu_grid.resolution() != nu_grid.resolution()) {
    throw DimensionMismatch("fit_kernel_pair: incompatible grids");
  }
  GridAtoms mu_atoms = nonzero_atoms(mu_grid);
  GridAtoms nu_atoms = nonzero_atoms(nu_grid);
  const DiscreteMeasure mu(mu_atoms.centers, mu_atoms.weights);
  const DiscreteMeasure nu(nu_atoms.centers, nu_atoms.weights);
  SolveResult solved = solve_discrete_uot(mu, nu, solver);

  KernelPairFit fit{
      TransportGrowthPair(std::make_shared<GridPotentialImpl>(
          mu_atoms, nu_atoms, solved.potentials, clip, mu_grid.dim())),
      GridPotentials{mu_grid.resolution(), mu_grid.dim(), mu_atoms.cells,
                     solved.potentials.phi, nu_atoms.cells,
                     solved.potentials.psi},
      solved.primal_value, solved.dual_value};
  return fit;
}

std::vector<PairEvaluation> evaluate_pair(const TransportGrowthPair& pair,
                                          const Eigen::MatrixXd& queries) {
  std::vector<PairEvaluation> out;
  out.reserve(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    out.push_back(pair.evaluate(queries.row(i).transpose()));
  }
  return out;
}

}  // namespace uot
