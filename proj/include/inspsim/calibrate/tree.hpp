#pragma once

// Regression tree grown greedily on the normalized standard deviation:
// a split is scored 1 - (n_L sd_L + n_R sd_R) / (n sd_parent), using
// population standard deviations.

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "inspsim/calibrate/dataset.hpp"

namespace inspsim::calibrate {

struct LeafStats {
  double fraction = 0.0;  // share of training rows reaching the node
  double variance = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  Eigen::Index count = 0;
};

struct TreeNode {
  LeafStats stats;
  // Internal nodes only: rows with x[variable] <= threshold go left.
  Eigen::Index variable = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& root() const { return nodes.front(); }
  std::vector<int> leaves() const;
  int depth() const;
};

struct TreeParams {
  Eigen::Index min_leaf = 1;
  int max_depth = 8;
};

struct Split {
  Eigen::Index variable = -1;
  double threshold = 0.0;
  double score = 0.0;
};

// Best split of the given rows over all variables and midpoints between
// consecutive distinct values; ties keep the lowest variable, then the lowest
// threshold. nullopt when no admissible split exists.
std::optional<Split> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows,
                                Eigen::Index min_leaf);

Tree fit_tree(const Dataset& ds, const TreeParams& params = {});

// Statistics of the leaf x falls into.
const LeafStats& tree_predict(const Tree& tree, const Eigen::Ref<const Eigen::VectorXd>& x);
int tree_leaf_index(const Tree& tree, const Eigen::Ref<const Eigen::VectorXd>& x);

nlohmann::json tree_to_json(const Tree& tree, const std::vector<std::string>& names = {});

}  // namespace inspsim::calibrate
