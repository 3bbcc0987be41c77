#pragma once

// Single-hidden-layer feed-forward regression network
//
//   f(x) = v_0 + sum_h v_h g(<(1, x), w_h>),   h = 1..n
//
// and its relevance measure, the analytic partial derivative df/dx^k.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "inspsim/calibrate/dataset.hpp"

namespace inspsim::calibrate {

enum class Activation { Logistic, Tanh, Identity };

std::string to_string(Activation g);
Activation activation_from_string(const std::string& text);

template <typename Scalar>
Scalar activate(Activation g, Scalar z) {
  using std::exp;
  using std::tanh;
  switch (g) {
    case Activation::Logistic: return Scalar(1) / (Scalar(1) + exp(-z));
    case Activation::Tanh: return tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

template <typename Scalar>
Scalar activate_derivative(Activation g, Scalar z) {
  switch (g) {
    case Activation::Logistic: {
      const Scalar s = activate(g, z);
      return s * (Scalar(1) - s);
    }
    case Activation::Tanh: {
      const Scalar t = activate(g, z);
      return Scalar(1) - t * t;
    }
    case Activation::Identity: return Scalar(1);
  }
  return Scalar(1);
}

template <typename Scalar>
struct Network {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Activation activation = Activation::Logistic;
  // Column h holds w_h = (w_0h, ..., w_dh); row 0 is the bias.
  Matrix hidden;
  // (v_0, v_1, ..., v_n).
  Vector output;

  Network() = default;
  Network(Eigen::Index inputs, Eigen::Index units, Activation g)
      : activation(g), hidden(Matrix::Zero(inputs + 1, units)), output(Vector::Zero(units + 1)) {}

  Eigen::Index inputs() const { return hidden.rows() - 1; }
  Eigen::Index units() const { return hidden.cols(); }

  bool consistent() const {
    return hidden.rows() >= 1 && output.size() == hidden.cols() + 1 && hidden.allFinite() && output.allFinite();
  }
};

using NetworkD = Network<double>;

namespace detail {

template <typename Scalar, typename Derived>
void check_input(const Network<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != net.inputs()) {
    throw std::invalid_argument("network expects " + std::to_string(net.inputs()) + " inputs, got " +
                                std::to_string(x.size()));
  }
}

// <(1, x), w_h> for every hidden unit.
template <typename Scalar, typename Derived>
typename Network<Scalar>::Vector pre_activation(const Network<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  const auto d = net.inputs();
  return net.hidden.row(0).transpose() + net.hidden.bottomRows(d).transpose() * x.template cast<Scalar>();
}

}  // namespace detail

template <typename Scalar, typename Derived>
Scalar nn_eval(const Network<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input(net, x);
  const auto z = detail::pre_activation(net, x);
  Scalar out = net.output(0);
  for (Eigen::Index h = 0; h < net.units(); ++h) out += net.output(h + 1) * activate(net.activation, z(h));
  return out;
}

// All partial derivatives df/dx^k at x.
template <typename Scalar, typename Derived>
typename Network<Scalar>::Vector relevance_gradient(const Network<Scalar>& net, const Eigen::MatrixBase<Derived>& x) {
  detail::check_input(net, x);
  const auto z = detail::pre_activation(net, x);
  typename Network<Scalar>::Vector scale(net.units());
  for (Eigen::Index h = 0; h < net.units(); ++h) {
    scale(h) = net.output(h + 1) * activate_derivative(net.activation, z(h));
  }
  return net.hidden.bottomRows(net.inputs()) * scale;
}

// df/dx^k for a zero-based input index k.
template <typename Scalar, typename Derived>
Scalar relevance(const Network<Scalar>& net, const Eigen::MatrixBase<Derived>& x, Eigen::Index k) {
  if (k < 0 || k >= net.inputs()) {
    throw std::out_of_range("relevance index " + std::to_string(k) + " outside [0, " + std::to_string(net.inputs()) +
                            ")");
  }
  return relevance_gradient(net, x)(k);
}

struct TrainParams {
  Eigen::Index units = 4;
  Activation activation = Activation::Logistic;
  double learning_rate = 0.05;
  int epochs = 2000;
  std::uint64_t seed = 1;
};

struct TrainReport {
  double initial_mse = 0.0;
  double final_mse = 0.0;
  int epochs = 0;
  std::vector<double> history;  // mse after each epoch
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, const std::string& what) : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

double mean_squared_error(const NetworkD& net, const Dataset& ds);

// Full-batch gradient descent on the mean squared error from a seeded
// uniform(-0.5, 0.5) start. The step size is halved whenever a step would
// raise the error and grown gently after each accepted step, so the error
// never increases from one epoch to the next.
NetworkD nn_train(const Dataset& ds, const TrainParams& params, TrainReport* report = nullptr);

struct RankedVariable {
  Eigen::Index index = 0;
  std::string name;
  double mean_abs_relevance = 0.0;
};

// Variables ordered by mean |df/dx^k| over the dataset rows, largest first.
std::vector<RankedVariable> rank_relevance(const NetworkD& net, const Dataset& ds);

nlohmann::json network_to_json(const NetworkD& net);
NetworkD network_from_json(const nlohmann::json& doc);

}  // namespace inspsim::calibrate
