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


#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "abusekit/classifier.hpp"
#include "abusekit/rng.hpp"

namespace abusekit::ml {

struct TrainConfig {
  double learning_rate = 0.001;
  double dropout = 0.1;
  int batch_size = 16;
  int epochs = 50;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& doc);
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected ReLU network with a 2-way softmax head. Dropout may be
/// applied to the input and/or after every hidden activation (train only).
class Mlp : public BinaryClassifier {
 public:
  enum class Role { kAdima, kTwoStage, kBase };

  Mlp() = default;
  /// Uniform(-1/sqrt(in), 1/sqrt(in)) initialization of weights and biases.
  Mlp(std::vector<int> widths, double input_dropout, double hidden_dropout, std::uint64_t seed,
      Role role = Role::kBase);

  std::string kind() const override;
  Eigen::Index input_dim() const override { return widths_.front(); }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  nlohmann::json to_json() const override;
  static Mlp from_json(const nlohmann::json& doc);

  /// Raw logits, n x 2, dropout disabled.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const;
  /// Softmax probabilities, n x 2.
  Eigen::MatrixXd softmax(const Eigen::MatrixXd& x) const;

  /// Mean softmax cross-entropy over the batch and its gradients (same
  /// shapes as layers()). Dropout masks are drawn from `rng` when non-null.
  double loss_and_gradients(const Eigen::MatrixXd& x, std::span<const int> y, std::vector<DenseLayer>& grads,
                            Rng* dropout_rng) const;
  double loss(const Eigen::MatrixXd& x, std::span<const int> y) const;

  const std::vector<int>& widths() const { return widths_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  double input_dropout() const { return input_dropout_; }
  double hidden_dropout() const { return hidden_dropout_; }
  Role role() const { return role_; }
  const TrainConfig& train_config() const { return config_; }
  void set_train_config(const TrainConfig& config) { config_ = config; }

 private:
  std::vector<int> widths_;
  std::vector<DenseLayer> layers_;
  double input_dropout_ = 0.0;
  double hidden_dropout_ = 0.0;
  Role role_ = Role::kBase;
  TrainConfig config_;
};

/// Adam over seeded per-epoch shuffles; the last partial batch is kept.
/// Fully deterministic given (data, config).
void train_mlp(Mlp& model, const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config);

/// in -> 512 -> 256 -> 128 -> 2 with dropout after each hidden layer.
Mlp train_ac(const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config = {});

inline constexpr int kTspInputDim = 768;
/// Single linear 768 -> 2 layer, dropout on its input.
Mlp train_tsp(const Eigen::MatrixXd& x, std::span<const int> y, const TrainConfig& config = {});

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t parameters_checked = 0;
};

/// Analytic backprop gradient versus central differences of step `h` on
/// every parameter. Dropout is not applied.
GradCheckResult grad_check(const Mlp& model, const Eigen::MatrixXd& x, std::span<const int> y, double h = 1e-5);

}  // namespace abusekit::ml
