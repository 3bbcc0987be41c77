#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace inspsim::calibrate {

// Rows of explaining variables X with the explained variable y.
struct Dataset {
  std::vector<std::string> names;  // one per column of X
  std::string target;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index inputs() const { return X.cols(); }
};

// Reads delimited text with a header row. The target column is named; every
// other column becomes an explaining variable. Empty or non-numeric cells are
// rejected with their row and column.
Dataset read_dataset_csv(std::istream& in, const std::string& target, char delimiter = ',');
Dataset read_dataset_csv(const std::filesystem::path& path, const std::string& target, char delimiter = ',');

// Per-column z-score parameters. Columns with zero spread keep sd 1.
struct Scaling {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_sd;
  double y_mean = 0.0;
  double y_sd = 1.0;
};

Scaling fit_scaling(const Dataset& ds);
Dataset standardize(const Dataset& ds, const Scaling& scaling);

}  // namespace inspsim::calibrate
