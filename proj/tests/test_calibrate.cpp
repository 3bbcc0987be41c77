#include <doctest.h>

#include <random>
#include <sstream>

#include "calibrate_oracles.hpp"
#include "inspsim/calibrate/dataset.hpp"

using namespace inspsim::calibrate;
using namespace inspsim::testing;

namespace {

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y) {
  Dataset ds;
  for (Eigen::Index k = 0; k < X.cols(); ++k) ds.names.push_back("x" + std::to_string(k + 1));
  ds.target = "y";
  ds.X = std::move(X);
  ds.y = std::move(y);
  return ds;
}

double variance(const Eigen::VectorXd& y) { return (y.array() - y.mean()).square().mean(); }

std::vector<double> to_vector(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

TEST_CASE("network with silent hidden units is constant") {
  std::mt19937_64 rng(1);
  NetworkD net = random_network(rng, 3, 4, Activation::Tanh);
  net.output.tail(4).setZero();
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d x = Eigen::Vector3d::Random() * 5.0;
    CHECK(nn_eval(net, x) == net.output(0));
    CHECK(relevance_gradient(net, x).isZero());
  }
}

TEST_CASE("hand-evaluated identity network") {
  NetworkD net(1, 1, Activation::Identity);
  net.hidden << 1.0, 3.0;
  net.output << 0.0, 2.0;
  Eigen::VectorXd x(1);
  x << 4.0;
  CHECK(nn_eval(net, x) == 26.0);
  CHECK(relevance(net, x, 0) == 6.0);
  CHECK_THROWS_AS(relevance(net, x, 1), std::out_of_range);
  CHECK_THROWS_AS(nn_eval(net, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("identity relevance is the weight product, independent of x") {
  std::mt19937_64 rng(2);
  const NetworkD net = random_network(rng, 4, 3, Activation::Identity);
  for (Eigen::Index k = 0; k < 4; ++k) {
    double expected = 0.0;
    for (Eigen::Index h = 0; h < 3; ++h) expected += net.output(h + 1) * net.hidden(k + 1, h);
    for (int i = 0; i < 5; ++i) {
      const Eigen::Vector4d x = Eigen::Vector4d::Random() * 10.0;
      CHECK(relevance(net, x, k) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluation matches an independent implementation") {
  std::mt19937_64 rng(3);
  for (auto g : {Activation::Tanh, Activation::Logistic, Activation::Identity}) {
    for (int i = 0; i < 50; ++i) {
      const NetworkD net = random_network(rng, 1 + static_cast<Eigen::Index>(rng() % 5), 1 + static_cast<Eigen::Index>(rng() % 6), g, 0.3);
      const Eigen::VectorXd x = Eigen::VectorXd::Random(net.inputs());
      CHECK(std::abs(nn_eval(net, x) - oracle_eval(net, to_vector(x))) < 1e-12);
    }
  }
}

TEST_CASE("relevance matches central finite differences") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto g = static_cast<Activation>(i % 3);
    const NetworkD net = random_network(rng, 1 + static_cast<Eigen::Index>(rng() % 5), 1 + static_cast<Eigen::Index>(rng() % 6), g);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(net.inputs()) * 2.0;
    const Eigen::VectorXd grad = relevance_gradient(net, x);
    for (Eigen::Index k = 0; k < net.inputs(); ++k) {
      const double fd = finite_difference(net, to_vector(x), static_cast<std::size_t>(k));
      const double scale = std::max({std::abs(grad(k)), std::abs(fd), 1e-8});
      CHECK(std::abs(grad(k) - fd) / scale < 1e-4);
    }
  }
}

TEST_CASE("training recovers a linear target") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd X(200, 3);
  Eigen::VectorXd y(200);
  for (Eigen::Index r = 0; r < 200; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) X(r, c) = u(rng);
    y(r) = 2.0 + 3.0 * X(r, 0) - 1.5 * X(r, 1) + 0.5 * X(r, 2);
  }
  const Dataset ds = make_dataset(X, y);
  TrainParams params;
  params.activation = Activation::Identity;
  params.units = 2;
  params.epochs = 3000;
  TrainReport report;
  const NetworkD net = nn_train(ds, params, &report);
  CHECK(report.final_mse < 1e-4 * variance(y));
  CHECK(mean_squared_error(net, ds) == doctest::Approx(report.final_mse));
  CHECK(report.final_mse <= report.initial_mse);
  for (std::size_t e = 1; e < report.history.size(); ++e) CHECK(report.history[e] <= report.history[e - 1]);
}

TEST_CASE("training fits a single row and is deterministic") {
  Eigen::MatrixXd X(1, 2);
  X << 0.3, -0.7;
  Eigen::VectorXd y(1);
  y << 4.2;
  const Dataset one = make_dataset(X, y);
  TrainParams params;
  params.epochs = 500;
  TrainReport report;
  nn_train(one, params, &report);
  CHECK(report.final_mse < 1e-10);

  std::mt19937_64 rng(6);
  Eigen::MatrixXd X2 = Eigen::MatrixXd::Random(50, 2);
  Eigen::VectorXd y2 = (X2.col(0).array() * 2.0).sin().matrix() + X2.col(1);
  const Dataset ds = make_dataset(X2, y2);
  params.epochs = 200;
  const NetworkD a = nn_train(ds, params);
  const NetworkD b = nn_train(ds, params);
  CHECK(a.hidden == b.hidden);
  CHECK(a.output == b.output);
  params.seed = 2;
  CHECK_FALSE(nn_train(ds, params).hidden == a.hidden);
}

TEST_CASE("invalid training input is rejected") {
  TrainParams params;
  CHECK_THROWS_AS(nn_train(Dataset{}, params), std::invalid_argument);
  const Dataset ds = make_dataset(Eigen::MatrixXd::Ones(3, 1), Eigen::VectorXd::Ones(3));
  params.units = 0;
  CHECK_THROWS_AS(nn_train(ds, params), std::invalid_argument);
}

TEST_CASE("relevance ranking finds the driving variable") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd X(300, 3);
  Eigen::VectorXd y(300);
  for (Eigen::Index r = 0; r < 300; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) X(r, c) = n01(rng);
    y(r) = std::tanh(1.5 * X(r, 1)) + 0.3 * X(r, 1);
  }
  const Dataset ds = make_dataset(X, y);
  TrainParams params;
  params.units = 3;
  params.activation = Activation::Tanh;
  params.epochs = 1500;
  const auto ranked = rank_relevance(nn_train(ds, params), ds);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].name == "x2");
  CHECK(ranked[0].mean_abs_relevance > 5.0 * ranked[1].mean_abs_relevance);

  const Dataset single = make_dataset(X.leftCols(1), y);
  CHECK(rank_relevance(nn_train(single, params), single).front().index == 0);
}

TEST_CASE("a noise target yields small relevances") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd X(1000, 3);
  Eigen::VectorXd y(1000);
  for (Eigen::Index r = 0; r < 1000; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) X(r, c) = n01(rng);
    y(r) = n01(rng);
  }
  const Dataset ds = make_dataset(X, y);
  TrainParams params;
  params.units = 2;
  params.epochs = 300;
  for (const auto& v : rank_relevance(nn_train(ds, params), ds)) CHECK(v.mean_abs_relevance < 0.2);
}

TEST_CASE("model JSON round-trips") {
  std::mt19937_64 rng(9);
  const NetworkD net = random_network(rng, 3, 2, Activation::Logistic);
  const NetworkD back = network_from_json(nlohmann::json::parse(network_to_json(net).dump()));
  CHECK(back.hidden == net.hidden);
  CHECK(back.output == net.output);
  CHECK(back.activation == net.activation);
  auto doc = network_to_json(net);
  doc["output"] = std::vector<double>{1.0};
  CHECK_THROWS(network_from_json(doc));
}

TEST_CASE("CSV ingestion") {
  std::istringstream in("a,b,y\n1,2,3\n4,5,6\n");
  const Dataset ds = read_dataset_csv(in, "y");
  CHECK(ds.names == std::vector<std::string>{"a", "b"});
  CHECK(ds.rows() == 2);
  CHECK(ds.X(1, 0) == 4.0);
  CHECK(ds.y(1) == 6.0);
  std::istringstream missing("a,y\n1,\n");
  CHECK_THROWS(read_dataset_csv(missing, "y"));
  std::istringstream junk("a,y\n1,abc\n");
  CHECK_THROWS(read_dataset_csv(junk, "y"));
  std::istringstream no_target("a,b\n1,2\n");
  CHECK_THROWS(read_dataset_csv(no_target, "y"));
}

TEST_CASE("constant target grows a single leaf") {
  const Dataset ds = make_dataset(Eigen::MatrixXd::Random(30, 2), Eigen::VectorXd::Constant(30, 4.0));
  const Tree t = fit_tree(ds);
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.root().stats.sd == 0.0);
  CHECK(t.root().stats.fraction == 1.0);
  const auto& leaf = tree_predict(t, Eigen::Vector2d(0.1, 0.2));
  CHECK(leaf.mean == 4.0);
  CHECK(leaf.fraction == 1.0);
}

TEST_CASE("step target splits at the step") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(200, 2);
  Eigen::VectorXd y(200);
  for (Eigen::Index r = 0; r < 200; ++r) {
    X(r, 0) = u(rng);
    X(r, 1) = u(rng);
    y(r) = X(r, 0) < 0.4 ? 1.0 : 5.0;
  }
  const Dataset ds = make_dataset(X, y);
  const Tree t = fit_tree(ds);
  CHECK(t.root().variable == 0);
  CHECK(t.root().threshold == doctest::Approx(0.4).epsilon(0.05));
  const auto oracle = exhaustive_split(X, y, 1);
  REQUIRE(oracle);
  CHECK(oracle->variable == 0);
  CHECK(t.root().threshold == oracle->threshold);
  CHECK(tree_predict(t, Eigen::Vector2d(0.1, 0.9)).mean == 1.0);
  CHECK(tree_predict(t, Eigen::Vector2d(0.9, 0.1)).mean == 5.0);
}

namespace {

// Full tree by recursive exhaustive search, compared node by node.
void compare_subtree(const Tree& t, int id, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int depth,
                     const TreeParams& params) {
  const auto& node = t.nodes[static_cast<std::size_t>(id)];
  std::vector<double> ys(y.data(), y.data() + y.size());
  CHECK(node.stats.count == X.rows());
  CHECK(node.stats.sd == doctest::Approx(two_pass_sd(ys)));
  const auto oracle = depth < params.max_depth ? exhaustive_split(X, y, params.min_leaf) : std::nullopt;
  if (!oracle || oracle->score <= 1e-12) {
    CHECK(node.is_leaf());
    return;
  }
  REQUIRE_FALSE(node.is_leaf());
  // Equal-score candidates may be chosen either way; the chosen split must be optimal.
  CHECK(std::abs(oracle_split_score(X, y, node.variable, node.threshold) - oracle->score) < 1e-9);
  std::vector<Eigen::Index> left, right;
  for (Eigen::Index r = 0; r < X.rows(); ++r) (X(r, node.variable) <= node.threshold ? left : right).push_back(r);
  auto take = [&](const std::vector<Eigen::Index>& rows, int child) {
    Eigen::MatrixXd Xs(static_cast<Eigen::Index>(rows.size()), X.cols());
    Eigen::VectorXd ys2(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Xs.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
      ys2(static_cast<Eigen::Index>(i)) = y(rows[i]);
    }
    compare_subtree(t, child, Xs, ys2, depth + 1, params);
  };
  take(left, node.left);
  take(right, node.right);
}

}  // namespace

TEST_CASE("six-row tree equals the exhaustive oracle") {
  Eigen::MatrixXd X(6, 2);
  X << 1, 10,
       2, 40,
       3, 20,
       4, 60,
       5, 30,
       6, 50;
  Eigen::VectorXd y(6);
  y << 1.0, 1.2, 0.9, 7.0, 6.5, 3.0;
  const Dataset ds = make_dataset(X, y);
  const TreeParams params{1, 8};
  const Tree t = fit_tree(ds, params);
  const auto root = exhaustive_split(X, y, 1);
  REQUIRE(root);
  CHECK(t.root().variable == root->variable);
  CHECK(t.root().threshold == root->threshold);
  compare_subtree(t, 0, X, y, 0, params);
}

TEST_CASE("trees partition the training rows") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng() % 60);
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < 3; ++c) X(r, c) = static_cast<double>(rng() % 7);
      y(r) = static_cast<double>(rng() % 100) / 10.0;
    }
    const TreeParams params{1 + static_cast<Eigen::Index>(rng() % 4), 1 + static_cast<int>(rng() % 5)};
    const Dataset ds = make_dataset(X, y);
    const Tree t = fit_tree(ds, params);
    double fraction = 0.0;
    Eigen::Index count = 0;
    for (int leaf : t.leaves()) {
      fraction += t.nodes[static_cast<std::size_t>(leaf)].stats.fraction;
      count += t.nodes[static_cast<std::size_t>(leaf)].stats.count;
      CHECK(t.nodes[static_cast<std::size_t>(leaf)].stats.count >= std::min(params.min_leaf, n));
    }
    CHECK(fraction == doctest::Approx(1.0));
    CHECK(count == n);
    CHECK(t.depth() <= params.max_depth);
    std::vector<Eigen::Index> hits(t.nodes.size(), 0);
    for (Eigen::Index r = 0; r < n; ++r) ++hits[static_cast<std::size_t>(tree_leaf_index(t, X.row(r).transpose()))];
    for (int leaf : t.leaves()) CHECK(hits[static_cast<std::size_t>(leaf)] == t.nodes[static_cast<std::size_t>(leaf)].stats.count);
    compare_subtree(t, 0, X, y, 0, params);
  }
}

TEST_CASE("standardization yields zero mean and unit spread") {
  Eigen::MatrixXd X(4, 2);
  X << 100, 1,
       300, 1,
       500, 1,
       700, 1;
  Eigen::VectorXd y(4);
  y << 2, 4, 6, 8;
  const Dataset ds = make_dataset(X, y);
  const Scaling sc = fit_scaling(ds);
  CHECK(sc.x_mean(0) == 400.0);
  CHECK(sc.x_sd(1) == 1.0);
  const Dataset z = standardize(ds, sc);
  CHECK(std::abs(z.X.col(0).mean()) < 1e-12);
  CHECK(std::sqrt(z.X.col(0).array().square().mean()) == doctest::Approx(1.0));
  CHECK(z.X.col(1).isZero());
  CHECK(std::abs(z.y.mean()) < 1e-12);
}
