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


#include "abusekit/tsne.hpp"

#include <algorithm>
#include <cmath>

#include "abusekit/error.hpp"
#include "abusekit/rng.hpp"
#include "doctest.h"

using namespace abusekit;

namespace {

void two_clusters(int per_cluster, int dim, double separation, std::uint64_t seed, Eigen::MatrixXd& x,
                  std::vector<int>& labels) {
  Rng rng(seed);
  x.resize(2 * per_cluster, dim);
  labels.assign(static_cast<std::size_t>(2 * per_cluster), 0);
  for (int i = 0; i < 2 * per_cluster; ++i) {
    const int label = i < per_cluster ? 0 : 1;
    labels[static_cast<std::size_t>(i)] = label;
    for (int j = 0; j < dim; ++j) x(i, j) = rng.normal() + (label && j == 0 ? separation : 0.0);
  }
}

double nearest_centroid_accuracy(const Eigen::MatrixXd& y, const std::vector<int>& labels) {
  Eigen::RowVector2d c[2] = {Eigen::RowVector2d::Zero(), Eigen::RowVector2d::Zero()};
  int counts[2] = {0, 0};
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    c[labels[static_cast<std::size_t>(i)]] += y.row(i);
    ++counts[labels[static_cast<std::size_t>(i)]];
  }
  c[0] /= counts[0];
  c[1] /= counts[1];
  int correct = 0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const int nearest = (y.row(i) - c[0]).norm() <= (y.row(i) - c[1]).norm() ? 0 : 1;
    correct += nearest == labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(correct) / static_cast<double>(y.rows());
}

}  // namespace

TEST_CASE("affinities are symmetric, normalized and hit the target perplexity") {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  two_clusters(20, 3, 5.0, 1, x, labels);
  const Eigen::MatrixXd p = tsne_affinities(x, 5.0);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(p.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two separated clusters stay separated and KL drops after exaggeration") {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  two_clusters(50, 5, 10.0, 2, x, labels);
  TsneConfig config;
  config.seed = 3;
  const TsneResult r = tsne(x, config);
  REQUIRE(r.embedding.rows() == 100);
  REQUIRE(r.embedding.cols() == 2);
  CHECK(r.kl_trace.size() == static_cast<std::size_t>(config.iterations) + 1);
  CHECK(nearest_centroid_accuracy(r.embedding, labels) >= 0.95);
  CHECK(r.final_kl() < 0.5 * r.kl_after_exaggeration(config));
  CHECK(r.final_kl() < r.kl_trace.front());
}

TEST_CASE("a duplicated pair ends up closer than most pairs") {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  two_clusters(50, 4, 4.0, 5, x, labels);
  x.row(1) = x.row(0);
  const auto r = tsne(x, TsneConfig{});
  std::vector<double> distances;
  for (Eigen::Index i = 0; i < r.embedding.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < r.embedding.rows(); ++j) distances.push_back((r.embedding.row(i) - r.embedding.row(j)).norm());
  }
  std::sort(distances.begin(), distances.end());
  const double tenth = distances[distances.size() / 10];
  CHECK((r.embedding.row(0) - r.embedding.row(1)).norm() < tenth);
}

TEST_CASE("t-SNE is deterministic for a seed and validates its input") {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  two_clusters(10, 3, 3.0, 8, x, labels);
  TsneConfig config;
  config.perplexity = 5.0;
  config.iterations = 100;
  CHECK(tsne(x, config).embedding == tsne(x, config).embedding);
  CHECK_THROWS_AS(tsne(Eigen::MatrixXd::Ones(20, 3), config), InvalidArgument);
  CHECK_THROWS_AS(tsne(x.topRows(4), config), InvalidArgument);
  config.perplexity = 30.0;
  CHECK_THROWS_AS(tsne(x, config), InvalidArgument);
}
