#include "inspsim/calibrate/network.hpp"

#include <algorithm>
#include <random>

namespace inspsim::calibrate {

std::string to_string(Activation g) {
  switch (g) {
    case Activation::Logistic: return "logistic";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& text) {
  if (text == "logistic") return Activation::Logistic;
  if (text == "tanh") return Activation::Tanh;
  if (text == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + text + "'");
}

namespace {

struct Gradient {
  Eigen::MatrixXd hidden;
  Eigen::VectorXd output;
};

// Forward pass over all rows: returns the residuals and fills the gradient of
// the mean squared error.
double loss_and_gradient(const NetworkD& net, const Dataset& ds, Gradient* grad) {
  const Eigen::Index n = ds.rows();
  // Z: rows x units pre-activations.
  const Eigen::MatrixXd Z = (ds.X * net.hidden.bottomRows(net.inputs())).rowwise() + net.hidden.row(0);
  const Eigen::MatrixXd G = Z.unaryExpr([&](double z) { return activate(net.activation, z); });
  const Eigen::VectorXd pred = (G * net.output.tail(net.units())).array() + net.output(0);
  const Eigen::VectorXd resid = pred - ds.y;
  const double mse = resid.squaredNorm() / static_cast<double>(n);
  if (grad) {
    const Eigen::VectorXd dpred = resid * (2.0 / static_cast<double>(n));
    grad->output.resize(net.output.size());
    grad->output(0) = dpred.sum();
    grad->output.tail(net.units()) = G.transpose() * dpred;
    const Eigen::MatrixXd Gp = Z.unaryExpr([&](double z) { return activate_derivative(net.activation, z); });
    // dL/dZ(r,h) = dpred(r) * v_h * g'(Z(r,h))
    const Eigen::MatrixXd dZ =
        (Gp.array().colwise() * dpred.array()).rowwise() * net.output.tail(net.units()).transpose().array();
    grad->hidden.resize(net.hidden.rows(), net.hidden.cols());
    grad->hidden.row(0) = dZ.colwise().sum();
    grad->hidden.bottomRows(net.inputs()) = ds.X.transpose() * dZ;
  }
  return mse;
}

}  // namespace

double mean_squared_error(const NetworkD& net, const Dataset& ds) {
  if (ds.inputs() != net.inputs()) throw std::invalid_argument("dataset and network dimensions differ");
  if (ds.rows() == 0) return 0.0;
  return loss_and_gradient(net, ds, nullptr);
}

NetworkD nn_train(const Dataset& ds, const TrainParams& params, TrainReport* report) {
  if (ds.rows() == 0 || ds.inputs() == 0) throw std::invalid_argument("nn_train: empty dataset");
  if (params.units < 1 || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw std::invalid_argument("nn_train: invalid hyper-parameters");
  }

  NetworkD net(ds.inputs(), params.units, params.activation);
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  for (Eigen::Index c = 0; c < net.hidden.cols(); ++c) {
    for (Eigen::Index r = 0; r < net.hidden.rows(); ++r) net.hidden(r, c) = init(rng);
  }
  for (Eigen::Index i = 0; i < net.output.size(); ++i) net.output(i) = init(rng);

  Gradient grad;
  double loss = loss_and_gradient(net, ds, &grad);
  if (!std::isfinite(loss)) throw DivergenceError(0, "nn_train: non-finite loss at epoch 0");
  TrainReport rep;
  rep.initial_mse = loss;

  double rate = params.learning_rate;
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      NetworkD trial = net;
      trial.hidden -= rate * grad.hidden;
      trial.output -= rate * grad.output;
      Gradient trial_grad;
      const double trial_loss = loss_and_gradient(trial, ds, &trial_grad);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        net = std::move(trial);
        grad = std::move(trial_grad);
        loss = trial_loss;
        rate *= 1.05;
        accepted = true;
      } else {
        rate *= 0.5;
      }
    }
    if (!std::isfinite(loss)) {
      throw DivergenceError(epoch, "nn_train: non-finite loss at epoch " + std::to_string(epoch));
    }
    rep.history.push_back(loss);
    rep.epochs = epoch;
    // No step of any useful size lowers the error: converged.
    if (!accepted) break;
  }
  rep.final_mse = loss;
  if (report) *report = std::move(rep);
  return net;
}

std::vector<RankedVariable> rank_relevance(const NetworkD& net, const Dataset& ds) {
  if (ds.inputs() != net.inputs()) throw std::invalid_argument("dataset and network dimensions differ");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(net.inputs());
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    total += relevance_gradient(net, ds.X.row(r).transpose()).cwiseAbs();
  }
  if (ds.rows() > 0) total /= static_cast<double>(ds.rows());

  std::vector<RankedVariable> ranked;
  for (Eigen::Index k = 0; k < net.inputs(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    ranked.push_back({k, idx < ds.names.size() ? ds.names[idx] : "x" + std::to_string(k + 1), total(k)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.mean_abs_relevance > b.mean_abs_relevance; });
  return ranked;
}

nlohmann::json network_to_json(const NetworkD& net) {
  nlohmann::json hidden = nlohmann::json::array();
  for (Eigen::Index h = 0; h < net.units(); ++h) {
    std::vector<double> column(net.hidden.col(h).data(), net.hidden.col(h).data() + net.hidden.rows());
    hidden.push_back(column);
  }
  std::vector<double> output(net.output.data(), net.output.data() + net.output.size());
  return {{"inputs", net.inputs()},
          {"units", net.units()},
          {"activation", to_string(net.activation)},
          {"hidden", hidden},
          {"output", output}};
}

NetworkD network_from_json(const nlohmann::json& doc) {
  const auto inputs = doc.at("inputs").get<Eigen::Index>();
  const auto units = doc.at("units").get<Eigen::Index>();
  NetworkD net(inputs, units, activation_from_string(doc.at("activation").get<std::string>()));
  const auto& hidden = doc.at("hidden");
  const auto& output = doc.at("output");
  if (static_cast<Eigen::Index>(hidden.size()) != units || static_cast<Eigen::Index>(output.size()) != units + 1) {
    throw std::invalid_argument("network document: weight dimensions do not match inputs/units");
  }
  for (Eigen::Index h = 0; h < units; ++h) {
    const auto column = hidden.at(static_cast<std::size_t>(h)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(column.size()) != inputs + 1) {
      throw std::invalid_argument("network document: hidden unit " + std::to_string(h) + " has wrong length");
    }
    net.hidden.col(h) = Eigen::Map<const Eigen::VectorXd>(column.data(), inputs + 1);
  }
  const auto v = output.get<std::vector<double>>();
  net.output = Eigen::Map<const Eigen::VectorXd>(v.data(), units + 1);
  if (!net.consistent()) throw std::invalid_argument("network document: non-finite weights");
  return net;
}

}  // namespace inspsim::calibrate
