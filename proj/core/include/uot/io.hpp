#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uot/kernel_estimator.hpp"
#include "uot/measures.hpp"
#include "uot/plan_estimator.hpp"
#include "uot/solver.hpp"

namespace uot::io {

// Sample CSV: header x0,...,x{d-1}[,weight]; one atom per row. When the
// weight column is absent, the total mass comes from a JSON sidecar
// { "mass": <real>, "dim": <int> } and every atom gets mass/n.
DiscreteMeasure load_discrete_measure(
    const std::filesystem::path& csv_path,
    const std::optional<std::filesystem::path>& sidecar_path = std::nullopt);

void save_discrete_measure(const std::filesystem::path& csv_path,
                           const DiscreteMeasure& measure,
                           bool with_weights = true);

void save_mass_sidecar(const std::filesystem::path& path, double mass,
                       int dim);

// GridMeasure JSON: { "dim", "resolution", "mass", "density": [...] },
// row-major with axis 0 slowest.
GridMeasure load_grid_measure(const std::filesystem::path& path);
void save_grid_measure(const std::filesystem::path& path,
                       const GridMeasure& grid);

// Plan export: CSV i,j,gamma for entries > 1e-15 plus a JSON sidecar
// { "primal", "dual", "eps_final", "row_mass", "col_mass" }.
void save_plan(const std::filesystem::path& csv_path,
               const std::filesystem::path& sidecar_path,
               const SolveResult& result);

// Potentials export: CSV index,phi and index,psi.
void save_potentials(const std::filesystem::path& phi_path,
                     const std::filesystem::path& psi_path,
                     const DualPotentials& potentials);

// Fitted-pair export: x0..x{d-1}, t0..t{d-1}, lambda, a per query.
void save_pair_evaluations(const std::filesystem::path& path,
                           const Eigen::MatrixXd& queries,
                           const std::vector<PairEvaluation>& evals);

// Grid-potentials dump: CSV cell_index,phi,psi (blank where a side dropped
// the cell) plus a JSON grid descriptor.
void save_grid_potentials(const std::filesystem::path& csv_path,
                          const std::filesystem::path& descriptor_path,
                          const GridPotentials& potentials);

Eigen::MatrixXd load_points_csv(const std::filesystem::path& csv_path);

}  // namespace uot::io
