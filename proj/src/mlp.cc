// Copyright 2026 The abusekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "abusekit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abusekit/eigen_blob.hpp"
#include "abusekit/error.hpp"

namespace abusekit::ml {
using nlohmann::json;

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate}, {"dropout", dropout}, {"batch_size", batch_size},
          {"epochs", epochs},               {"seed", seed},       {"beta1", beta1},
          {"beta2", beta2},                 {"epsilon", epsilon}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
  TrainConfig c;
  c.learning_rate = doc.value("learning_rate", c.learning_rate);
  c.dropout = doc.value("dropout", c.dropout);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.epochs = doc.value("epochs", c.epochs);
  c.seed = doc.value("seed", c.seed);
  c.beta1 = doc.value("beta1", c.beta1);
  c.beta2 = doc.value("beta2", c.beta2);
  c.epsilon = doc.value("epsilon", c.epsilon);
  return c;
}

namespace {

std::string_view role_name(Mlp::Role role) {
  switch (role) {
    case Mlp::Role::kAdima:
      return "ac";
    case Mlp::Role::kTwoStage:
      return "tsp";
    case Mlp::Role::kBase:
      break;
  }
  return "mlp";
}

// Inverted dropout: kept units are scaled by 1 / (1 - rate).
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Eigen::MatrixXd mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out = z.colwise() - z.rowwise().maxCoeff();
  out = out.array().exp();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

}  // namespace

Mlp::Mlp(std::vector<int> widths, double input_dropout, double hidden_dropout, std::uint64_t seed, Role role)
    : widths_(std::move(widths)), input_dropout_(input_dropout), hidden_dropout_(hidden_dropout), role_(role) {
  if (widths_.size() < 2) throw InvalidArgument("an MLP needs at least input and output widths");
  if (widths_.back() != 2) throw InvalidArgument("MLP output width must be 2");
  if (std::any_of(widths_.begin(), widths_.end(), [](int w) { return w <= 0; })) {
    throw InvalidArgument("MLP widths must be positive");
  }
  if (input_dropout < 0.0 || input_dropout >= 1.0 || hidden_dropout < 0.0 || hidden_dropout >= 1.0) {
    throw InvalidArgument("dropout rates must be in [0, 1)");
  }
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int in = widths_[l], out = widths_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) layer.weight(i, j) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index i = 0; i < out; ++i) layer.bias(i) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
}

std::string Mlp::kind() const { return std::string(role_name(role_)); }

Eigen::MatrixXd Mlp::logits(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) {
    throw InvalidArgument("MLP input dim " + std::to_string(x.cols()) + " != " + std::to_string(input_dim()));
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (a * layers_[l].weight.transpose()).rowwise() + layers_[l].bias.transpose();
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::softmax(const Eigen::MatrixXd& x) const { return row_softmax(logits(x)); }

Eigen::VectorXd Mlp::predict_proba(const Eigen::MatrixXd& x) const { return softmax(x).col(1); }

double Mlp::loss_and_gradients(const Eigen::MatrixXd& x, std::span<const int> y, std::vector<DenseLayer>& grads,
                               Rng* dropout_rng) const {
  const Eigen::Index n = x.rows();
  const std::size_t depth = layers_.size();
  // activations[l] is the (post-dropout) input of layer l.
  std::vector<Eigen::MatrixXd> activations(depth);
  std::vector<Eigen::MatrixXd> masks(depth);
  std::vector<Eigen::MatrixXd> pre(depth);

  activations[0] = x;
  if (dropout_rng && input_dropout_ > 0.0) {
    masks[0] = dropout_mask(n, x.cols(), input_dropout_, *dropout_rng);
    activations[0] = activations[0].cwiseProduct(masks[0]);
  }
  Eigen::MatrixXd out;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = (activations[l] * layers_[l].weight.transpose()).rowwise() + layers_[l].bias.transpose();
    if (l + 1 == depth) {
      out = pre[l];
      break;
    }
    Eigen::MatrixXd a = pre[l].cwiseMax(0.0);
    if (dropout_rng && hidden_dropout_ > 0.0) {
      masks[l + 1] = dropout_mask(n, a.cols(), hidden_dropout_, *dropout_rng);
      a = a.cwiseProduct(masks[l + 1]);
    }
    activations[l + 1] = std::move(a);
  }

  const Eigen::MatrixXd prob = row_softmax(out);
  double loss = 0.0;
  Eigen::MatrixXd delta = prob;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto label = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    // log-softmax for the target class, stable form.
    const double zmax = out.row(i).maxCoeff();
    const double lse = zmax + std::log((out.row(i).array() - zmax).exp().sum());
    loss -= out(i, label) - lse;
    delta(i, label) -= 1.0;
  }
  loss /= static_cast<double>(n);
  delta /= static_cast<double>(n);

  grads.resize(depth);
  for (std::size_t l = depth; l-- > 0;) {
    grads[l].weight = delta.transpose() * activations[l];
    grads[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * layers_[l].weight;
    if (masks[l].size() > 0) back = back.cwiseProduct(masks[l]);
    delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

double Mlp::loss(const Eigen::MatrixXd& x, std::span<const int> y) const {
  const Eigen::MatrixXd z = logits(x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double zmax = z.row(i).maxCoeff();
    const double lse = zmax + std::log((z.row(i).array() - zmax).exp().sum());
    total -= z(i, y[static_cast<std::size_t>(i)]) - lse;
  }
  return total / static_cast<double>(z.rows());
}

json Mlp::to_json() const {
  json blobs = json::array();
  for (const auto& layer : layers_) blobs.push_back({{"weight", to_blob(layer.weight)}, {"bias", to_blob(layer.bias)}});
  json config = {{"widths", widths_},
                 {"input_dropout", input_dropout_},
                 {"hidden_dropout", hidden_dropout_},
                 {"train", config_.to_json()}};
  return model_envelope(kind(), std::move(config), std::move(blobs));
}

Mlp Mlp::from_json(const json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  const json& config = doc.at("config");
  Mlp m;
  m.widths_ = config.at("widths").get<std::vector<int>>();
  if (m.widths_.size() < 2 || m.widths_.back() != 2) throw ParseError("MLP model has invalid widths");
  m.input_dropout_ = config.at("input_dropout").get<double>();
  m.hidden_dropout_ = config.at("hidden_dropout").get<double>();
  m.role_ = kind == "ac" ? Role::kAdima : kind == "tsp" ? Role::kTwoStage : Role::kBase;
  if (config.contains("train")) m.config_ = TrainConfig::from_json(config.at("train"));
  const json& blobs = doc.at("blobs");
  if (blobs.size() + 1 != m.widths_.size()) throw ParseError("MLP model layer count does not match widths");
  for (std::size_t l = 0; l < blobs.size(); ++l) {
    DenseLayer layer;
    layer.weight = matrix_from_blob(blobs[l].at("weight").get<std::string>(), m.widths_[l + 1], m.widths_[l]);
    layer.bias = vector_from_blob(blobs[l].at("bias").get<std::string>(), m.widths_[l + 1]);
    m.layers_.push_back(std::move(layer));
  }
  return m;
}

void train_mlp(Mlp& model, const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config) {
  check_training_set(x, y);
  if (x.cols() != model.input_dim()) throw InvalidArgument("training inputs do not match the MLP input width");
  if (config.batch_size <= 0 || config.epochs < 0 || !(config.learning_rate > 0.0)) {
    throw InvalidArgument("invalid MLP training configuration");
  }
  model.set_train_config(config);
  auto& layers = model.layers();
  std::vector<DenseLayer> m1, m2, grads;
  for (const auto& l : layers) {
    m1.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
    m2.push_back(m1.back());
  }

  Rng shuffle_rng(derive_seed(config.seed, 1));
  Rng dropout_rng(derive_seed(config.seed, 2));
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);

  long step = 0;
  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<Eigen::Index>(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(count), x.cols());
      yb.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x.row(order[start + i]);
        yb[i] = y[static_cast<std::size_t>(order[start + i])];
      }
      model.loss_and_gradients(xb, yb, grads, &dropout_rng);

      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto adam = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
        param.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config.epsilon);
      };
      for (std::size_t l = 0; l < layers.size(); ++l) {
        adam(layers[l].weight, m1[l].weight, m2[l].weight, grads[l].weight);
        adam(layers[l].bias, m1[l].bias, m2[l].bias, grads[l].bias);
      }
    }
  }
}

Mlp train_ac(const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config) {
  check_training_set(x, y);
  Mlp model({static_cast<int>(x.cols()), 512, 256, 128, 2}, 0.0, config.dropout, derive_seed(config.seed, 0),
            Mlp::Role::kAdima);
  train_mlp(model, x, y, config);
  return model;
}

Mlp train_tsp(const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config) {
  if (x.cols() != kTspInputDim) {
    throw InvalidArgument("TSP expects " + std::to_string(kTspInputDim) + "-dim text vectors, got " +
                          std::to_string(x.cols()));
  }
  check_training_set(x, y);
  Mlp model({kTspInputDim, 2}, config.dropout, 0.0, derive_seed(config.seed, 0), Mlp::Role::kTwoStage);
  train_mlp(model, x, y, config);
  return model;
}

GradCheckResult grad_check(const Mlp& model, const Eigen::MatrixXd& x, std::span<const int> y, double h) {
  std::vector<DenseLayer> analytic;
  model.loss_and_gradients(x, y, analytic, nullptr);
  Mlp probe = model;
  GradCheckResult result;

  auto check = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double plus = probe.loss(x, y);
    param = saved - h;
    const double minus = probe.loss(x, y);
    param = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double abs_err = std::abs(numeric - grad);
    const double scale = std::max(std::abs(numeric), std::abs(grad));
    result.max_absolute_error = std::max(result.max_absolute_error, abs_err);
    // Both sides negligible (e.g. a dead ReLU unit): no relative signal.
    if (scale > 1e-10) result.max_relative_error = std::max(result.max_relative_error, abs_err / scale);
    ++result.parameters_checked;
  };
  for (std::size_t l = 0; l < probe.layers().size(); ++l) {
    auto& layer = probe.layers()[l];
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) check(layer.weight(i, j), analytic[l].weight(i, j));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) check(layer.bias(i), analytic[l].bias(i));
  }
  return result;
}

}  // namespace abusekit::ml
