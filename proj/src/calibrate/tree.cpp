#include "inspsim/calibrate/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace inspsim::calibrate {

namespace {

LeafStats stats_of(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows, Eigen::Index total) {
  LeafStats s;
  s.count = static_cast<Eigen::Index>(rows.size());
  s.fraction = total > 0 ? static_cast<double>(s.count) / static_cast<double>(total) : 0.0;
  if (rows.empty()) return s;
  double sum = 0.0;
  for (auto r : rows) sum += y(r);
  s.mean = sum / static_cast<double>(rows.size());
  double ss = 0.0;
  for (auto r : rows) ss += (y(r) - s.mean) * (y(r) - s.mean);
  s.variance = ss / static_cast<double>(rows.size());
  s.sd = std::sqrt(s.variance);
  return s;
}

// Population sd from running sums; clamped against cancellation.
double sd_from_sums(double sum, double sum_sq, double n) {
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
}

struct Builder {
  const Dataset& ds;
  const TreeParams& params;
  Tree tree;

  int grow(std::vector<Eigen::Index> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[static_cast<std::size_t>(id)].stats = stats_of(ds.y, rows, ds.rows());
    if (depth >= params.max_depth || tree.nodes[static_cast<std::size_t>(id)].stats.sd <= 0.0) return id;

    const auto split = best_split(ds.X, ds.y, rows, params.min_leaf);
    if (!split || split->score <= 1e-12) return id;

    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    for (auto r : rows) (ds.X(r, split->variable) <= split->threshold ? left : right).push_back(r);

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.variable = split->variable;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

std::optional<Split> best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows,
                                Eigen::Index min_leaf) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  min_leaf = std::max<Eigen::Index>(1, min_leaf);
  if (n < 2 * min_leaf) return std::nullopt;

  // Centered on the parent mean so the running sums of squares do not cancel.
  double shift = 0.0;
  for (auto r : rows) shift += y(r);
  shift /= static_cast<double>(n);
  double total = 0.0;
  double total_sq = 0.0;
  for (auto r : rows) {
    total += y(r) - shift;
    total_sq += (y(r) - shift) * (y(r) - shift);
  }
  const double parent_sd = sd_from_sums(total, total_sq, static_cast<double>(n));
  if (parent_sd <= 0.0) return std::nullopt;

  std::optional<Split> best;
  std::vector<Eigen::Index> order(rows);
  for (Eigen::Index v = 0; v < X.cols(); ++v) {
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return X(a, v) < X(b, v); });
    double left = 0.0;
    double left_sq = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const auto r = order[static_cast<std::size_t>(i)];
      left += y(r) - shift;
      left_sq += (y(r) - shift) * (y(r) - shift);
      const double here = X(r, v);
      const double next = X(order[static_cast<std::size_t>(i + 1)], v);
      const Eigen::Index n_left = i + 1;
      const Eigen::Index n_right = n - n_left;
      if (here == next || n_left < min_leaf || n_right < min_leaf) continue;
      const double weighted = static_cast<double>(n_left) * sd_from_sums(left, left_sq, static_cast<double>(n_left)) +
                              static_cast<double>(n_right) *
                                  sd_from_sums(total - left, total_sq - left_sq, static_cast<double>(n_right));
      const double score = 1.0 - weighted / (static_cast<double>(n) * parent_sd);
      if (!best || score > best->score) best = Split{v, 0.5 * (here + next), score};
    }
  }
  return best;
}

Tree fit_tree(const Dataset& ds, const TreeParams& params) {
  if (ds.rows() == 0) throw std::invalid_argument("fit_tree: empty dataset");
  Builder builder{ds, params, {}};
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(ds.rows()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  builder.grow(std::move(rows), 0);
  return std::move(builder.tree);
}

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) out.push_back(static_cast<int>(i));
  }
  return out;
}

int Tree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

int tree_leaf_index(const Tree& tree, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (tree.nodes.empty()) throw std::invalid_argument("tree_predict: empty tree");
  int id = 0;
  while (!tree.nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.variable >= x.size()) throw std::invalid_argument("tree_predict: input has too few variables");
    id = x(node.variable) <= node.threshold ? node.left : node.right;
  }
  return id;
}

const LeafStats& tree_predict(const Tree& tree, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return tree.nodes[static_cast<std::size_t>(tree_leaf_index(tree, x))].stats;
}

nlohmann::json tree_to_json(const Tree& tree, const std::vector<std::string>& names) {
  auto describe = [&](const auto& self, int id) -> nlohmann::json {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    nlohmann::json j = {{"fraction", node.stats.fraction},
                        {"count", node.stats.count},
                        {"mean", node.stats.mean},
                        {"variance", node.stats.variance},
                        {"sd", node.stats.sd}};
    if (!node.is_leaf()) {
      const auto v = static_cast<std::size_t>(node.variable);
      j["variable"] = v < names.size() ? names[v] : "x" + std::to_string(v + 1);
      j["threshold"] = node.threshold;
      j["left"] = self(self, node.left);
      j["right"] = self(self, node.right);
    }
    return j;
  };
  return describe(describe, 0);
}

}  // namespace inspsim::calibrate
