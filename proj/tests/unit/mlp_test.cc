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

#include <cstring>

#include "abusekit/error.hpp"
#include "abusekit/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace abusekit;
using namespace abusekit::ml;

namespace {

void random_dataset(int n, int d, std::uint64_t seed, Eigen::MatrixXd& x, Labels& y) {
  Rng rng(seed);
  x.resize(n, d);
  y.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
  y[0] = 0;
  y[1] = 1;
}

double train_accuracy(const BinaryClassifier& model, const Eigen::MatrixXd& x, const Labels& y) {
  const Labels p = model.predict(x);
  int correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += p[i] == y[i];
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("AC topology is in-512-256-128-2 with dropout only on hidden layers") {
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(20, 7, 1, x, y);
  TrainConfig config;
  config.epochs = 1;
  const Mlp model = train_ac(x, y, config);
  CHECK(model.widths() == std::vector<int>{7, 512, 256, 128, 2});
  CHECK(model.layers().size() == 4);
  CHECK(model.hidden_dropout() == 0.1);
  CHECK(model.input_dropout() == 0.0);
  CHECK(model.kind() == "ac");
}

TEST_CASE("softmax rows sum to one and probabilities lie in [0, 1]") {
  Mlp model({5, 8, 2}, 0.0, 0.0, 3);
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(12, 5, 2, x, y);
  const Eigen::MatrixXd p = model.softmax(x * 50.0);
  CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
  CHECK(p.minCoeff() >= 0.0);
  CHECK(p.maxCoeff() <= 1.0);
}

TEST_CASE("gradient check on a [4, 8, 2] network") {
  Mlp model({4, 8, 2}, 0.0, 0.0, 11);
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(10, 4, 5, x, y);
  const auto result = grad_check(model, x, y);
  CHECK(result.parameters_checked == 4 * 8 + 8 + 8 * 2 + 2);
  CHECK(result.max_relative_error < 1e-4);

  // Central differences are O(h^2): a 10x larger step gives a larger error.
  const auto coarse = grad_check(model, x, y, 1e-3);
  const auto fine = grad_check(model, x, y, 1e-4);
  CHECK(coarse.max_absolute_error > fine.max_absolute_error);
}

TEST_CASE("zero-weight output layer gives softmax minus one-hot gradients") {
  Mlp model({3, 4, 2}, 0.0, 0.0, 2);
  model.layers()[1].weight.setZero();
  model.layers()[1].bias.setZero();
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(6, 3, 8, x, y);
  std::vector<DenseLayer> grads;
  model.loss_and_gradients(x, y, grads, nullptr);
  // All logits are zero so p = 0.5; d bias_c = mean(p_c - onehot_c).
  double positives = 0.0;
  for (int label : y) positives += label;
  const double n = static_cast<double>(y.size());
  CHECK(grads[1].bias(0) == doctest::Approx(0.5 - (n - positives) / n));
  CHECK(grads[1].bias(1) == doctest::Approx(0.5 - positives / n));
  CHECK(grads[0].weight.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("AC fits a 32-sample random dataset within 200 epochs") {
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(32, 10, 21, x, y);
  TrainConfig config;
  config.epochs = 200;
  config.seed = 4;
  const Mlp model = train_ac(x, y, config);
  CHECK(train_accuracy(model, x, y) == 1.0);
}

TEST_CASE("training is a pure function of data, config and seed") {
  Eigen::MatrixXd x;
  Labels y;
  random_dataset(40, 6, 3, x, y);
  TrainConfig config;
  config.epochs = 5;
  config.seed = 99;
  const Mlp a = train_ac(x, y, config);
  const Mlp b = train_ac(x, y, config);
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    const auto& wa = a.layers()[l].weight;
    const auto& wb = b.layers()[l].weight;
    CHECK(std::memcmp(wa.data(), wb.data(), sizeof(double) * static_cast<std::size_t>(wa.size())) == 0);
  }
  config.seed = 100;
  const Mlp c = train_ac(x, y, config);
  CHECK(c.layers()[0].weight != a.layers()[0].weight);
}

TEST_CASE("single-class training sets are rejected") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 3);
  Labels y(8, 1);
  CHECK_THROWS_AS(train_ac(x, y), InvalidArgument);
}

TEST_CASE("TSP is a single 768 to 2 linear layer") {
  Eigen::MatrixXd x;
  Labels y;
  testing::gaussian_blobs(40, kTspInputDim, 1.0, 6, x, y);
  TrainConfig config;
  config.epochs = 30;
  const Mlp model = train_tsp(x, y, config);
  CHECK(model.widths() == std::vector<int>{768, 2});
  CHECK(model.kind() == "tsp");
  CHECK(train_accuracy(model, x, y) == 1.0);
  CHECK_THROWS_AS(train_tsp(Eigen::MatrixXd::Random(4, 10), Labels{0, 1, 0, 1}), InvalidArgument);
}
