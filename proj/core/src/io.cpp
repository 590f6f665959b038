#include "uot/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace uot::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json parsed;
  try {
    in >> parsed;
  } catch (const json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parsed;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

Eigen::MatrixXd load_points_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open " + csv_path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw Error("empty CSV " + csv_path.string());
  }
  const auto columns = split_csv_line(header);
  int dim = 0;
  for (const auto& name : columns) {
    if (name == "x" + std::to_string(dim)) ++dim;
  }
  if (dim == 0) throw Error("no coordinate columns in " + csv_path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    for (int k = 0; k < dim; ++k) row.push_back(std::stod(fields.at(k)));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd points(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < dim; ++k) points(i, k) = rows[i][k];
  }
  return points;
}

DiscreteMeasure load_discrete_measure(
    const std::filesystem::path& csv_path,
    const std::optional<std::filesystem::path>& sidecar_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open " + csv_path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw Error("empty CSV " + csv_path.string());
  }
  const auto columns = split_csv_line(header);
  int dim = 0;
  for (const auto& name : columns) {
    if (name == "x" + std::to_string(dim)) ++dim;
  }
  if (dim == 0) throw Error("no coordinate columns in " + csv_path.string());
  const bool has_weights =
      !columns.empty() && columns.back() == "weight";

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> row;
    for (int k = 0; k < dim; ++k) row.push_back(std::stod(fields.at(k)));
    if (has_weights) row.push_back(std::stod(fields.at(dim)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptySample("no atoms in " + csv_path.string());

  const auto n = static_cast<int>(rows.size());
  Eigen::MatrixXd points(n, dim);
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) points(i, k) = rows[i][k];
    if (has_weights) weights[i] = rows[i][dim];
  }
  if (!has_weights) {
    std::filesystem::path descriptor =
        sidecar_path.value_or(csv_path.string() + ".json");
    const json meta = load_json(descriptor);
    const double mass = meta.at("mass").get<double>();
    if (meta.contains("dim") && meta.at("dim").get<int>() != dim) {
      throw DimensionMismatch("sidecar dim disagrees with CSV header");
    }
    weights.setConstant(mass / n);
  }
  return DiscreteMeasure(std::move(points), std::move(weights));
}

void save_discrete_measure(const std::filesystem::path& csv_path,
                           const DiscreteMeasure& measure,
                           bool with_weights) {
  std::ostringstream out;
  for (int k = 0; k < measure.dim(); ++k) {
    out << (k ? "," : "") << "x" << k;
  }
  if (with_weights) out << ",weight";
  out << "\n";
  for (int i = 0; i < measure.size(); ++i) {
    for (int k = 0; k < measure.dim(); ++k) {
      out << (k ? "," : "") << format_double(measure.points()(i, k));
    }
    if (with_weights) out << "," << format_double(measure.weights()[i]);
    out << "\n";
  }
  write_text(csv_path, out.str());
}

void save_mass_sidecar(const std::filesystem::path& path, double mass,
                       int dim) {
  json meta{{"mass", mass}, {"dim", dim}};
  write_text(path, meta.dump(2) + "\n");
}

GridMeasure load_grid_measure(const std::filesystem::path& path) {
  const json parsed = load_json(path);
  try {
    const int dim = parsed.at("dim").get<int>();
    const int resolution = parsed.at("resolution").get<int>();
    const double mass = parsed.at("mass").get<double>();
    const auto values = parsed.at("density").get<std::vector<double>>();
    Eigen::VectorXd density(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) density[i] = values[i];
    return GridMeasure(resolution, dim, std::move(density), mass);
  } catch (const json::exception& e) {
    throw Error("bad grid measure " + path.string() + ": " + e.what());
  }
}

void save_grid_measure(const std::filesystem::path& path,
                       const GridMeasure& grid) {
  json out{{"dim", grid.dim()},
           {"resolution", grid.resolution()},
           {"mass", grid.mass()}};
  out["density"] =
      std::vector<double>(grid.density().data(),
                          grid.density().data() + grid.density().size());
  write_text(path, out.dump() + "\n");
}

void save_plan(const std::filesystem::path& csv_path,
               const std::filesystem::path& sidecar_path,
               const SolveResult& result) {
  std::ostringstream out;
  out << "i,j,gamma\n";
  const auto& gamma = result.plan.gamma;
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
      if (gamma(i, j) > 1e-15) {
        out << i << "," << j << "," << format_double(gamma(i, j)) << "\n";
      }
    }
  }
  write_text(csv_path, out.str());
  json meta{{"primal", result.primal_value},
            {"dual", result.dual_value},
            {"eps_final", result.eps_final},
            {"row_mass", result.plan.row_marginals.sum()},
            {"col_mass", result.plan.col_marginals.sum()}};
  write_text(sidecar_path, meta.dump(2) + "\n");
}

void save_potentials(const std::filesystem::path& phi_path,
                     const std::filesystem::path& psi_path,
                     const DualPotentials& potentials) {
  std::ostringstream phi_out;
  phi_out << "index,phi\n";
  for (Eigen::Index i = 0; i < potentials.phi.size(); ++i) {
    phi_out << i << "," << format_double(potentials.phi[i]) << "\n";
  }
  write_text(phi_path, phi_out.str());
  std::ostringstream psi_out;
  psi_out << "index,psi\n";
  for (Eigen::Index j = 0; j < potentials.psi.size(); ++j) {
    psi_out << j << "," << format_double(potentials.psi[j]) << "\n";
  }
  write_text(psi_path, psi_out.str());
}

void save_pair_evaluations(const std::filesystem::path& path,
                           const Eigen::MatrixXd& queries,
                           const std::vector<PairEvaluation>& evals) {
  if (static_cast<std::size_t>(queries.rows()) != evals.size()) {
    throw DimensionMismatch("save_pair_evaluations: row count mismatch");
  }
  const int d = static_cast<int>(queries.cols());
  std::ostringstream out;
  for (int k = 0; k < d; ++k) out << (k ? "," : "") << "x" << k;
  for (int k = 0; k < d; ++k) out << ",t" << k;
  out << ",lambda,a\n";
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    for (int k = 0; k < d; ++k) {
      out << (k ? "," : "") << format_double(queries(i, k));
    }
    for (int k = 0; k < d; ++k) {
      out << "," << format_double(evals[i].target[k]);
    }
    out << "," << format_double(evals[i].lambda) << ","
        << format_double(evals[i].a) << "\n";
  }
  write_text(path, out.str());
}

void save_grid_potentials(const std::filesystem::path& csv_path,
                          const std::filesystem::path& descriptor_path,
                          const GridPotentials& potentials) {
  std::map<int, std::pair<std::optional<double>, std::optional<double>>>
      by_cell;
  for (std::size_t k = 0; k < potentials.phi_cells.size(); ++k) {
    by_cell[potentials.phi_cells[k]].first = potentials.phi[k];
  }
  for (std::size_t k = 0; k < potentials.psi_cells.size(); ++k) {
    by_cell[potentials.psi_cells[k]].second = potentials.psi[k];
  }
  std::ostringstream out;
  out << "cell_index,phi,psi\n";
  for (const auto& [cell, pair] : by_cell) {
    out << cell << ",";
    if (pair.first) out << format_double(*pair.first);
    out << ",";
    if (pair.second) out << format_double(*pair.second);
    out << "\n";
  }
  write_text(csv_path, out.str());
  json meta{{"dim", potentials.dim}, {"resolution", potentials.resolution}};
  write_text(descriptor_path, meta.dump(2) + "\n");
}

}  // namespace uot::io
