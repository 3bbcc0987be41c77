#include "inspsim/calibrate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace inspsim::calibrate {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delimiter)) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const std::string& target, char delimiter) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset: missing header row");
  const auto header = split(line, delimiter);
  const auto target_it = std::find(header.begin(), header.end(), target);
  if (target_it == header.end()) throw std::runtime_error("dataset: no column named '" + target + "'");
  const auto target_col = static_cast<std::size_t>(target_it - header.begin());

  Dataset ds;
  ds.target = target;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_col) ds.names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line, delimiter);
    if (cells.size() != header.size()) {
      throw std::runtime_error("dataset: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> x;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      std::size_t used = 0;
      try {
        value = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cells[c].empty() || used != cells[c].size() || !std::isfinite(value)) {
        throw std::runtime_error("dataset: line " + std::to_string(line_no) + ", column '" + header[c] +
                                 "': missing or non-numeric value");
      }
      if (c == target_col) {
        ys.push_back(value);
      } else {
        x.push_back(value);
      }
    }
    rows.push_back(std::move(x));
  }

  ds.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ds.names.size()));
  ds.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      ds.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    ds.y(static_cast<Eigen::Index>(r)) = ys[r];
  }
  return ds;
}

Dataset read_dataset_csv(const std::filesystem::path& path, const std::string& target, char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open " + path.string());
  return read_dataset_csv(in, target, delimiter);
}

Scaling fit_scaling(const Dataset& ds) {
  if (ds.rows() == 0) throw std::invalid_argument("fit_scaling: empty dataset");
  auto spread = [](double sd) { return sd > 0.0 ? sd : 1.0; };
  Scaling sc;
  sc.x_mean = ds.X.colwise().mean().transpose();
  sc.x_sd = ((ds.X.rowwise() - sc.x_mean.transpose()).array().square().colwise().mean().sqrt()).transpose();
  sc.x_sd = sc.x_sd.unaryExpr(spread);
  sc.y_mean = ds.y.mean();
  sc.y_sd = spread(std::sqrt((ds.y.array() - sc.y_mean).square().mean()));
  return sc;
}

Dataset standardize(const Dataset& ds, const Scaling& sc) {
  if (sc.x_mean.size() != ds.inputs()) throw std::invalid_argument("standardize: scaling has the wrong width");
  Dataset out = ds;
  out.X = ((ds.X.rowwise() - sc.x_mean.transpose()).array().rowwise() / sc.x_sd.transpose().array()).matrix();
  out.y = ((ds.y.array() - sc.y_mean) / sc.y_sd).matrix();
  return out;
}

}  // namespace inspsim::calibrate
