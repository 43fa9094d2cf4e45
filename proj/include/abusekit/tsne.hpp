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
#include <vector>

namespace abusekit {

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  int exaggeration_iterations = 250;
  double exaggeration = 12.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double min_gain = 0.01;
  std::uint64_t seed = 0;
};

struct TsneResult {
  Eigen::MatrixXd embedding;  // n x 2
  /// KL(P || Q) against the un-exaggerated P; entry t is measured after t
  /// updates, so the vector holds iterations + 1 values.
  std::vector<double> kl_trace;

  double kl_after_exaggeration(const TsneConfig& config) const;
  double final_kl() const { return kl_trace.back(); }
};

/// Symmetric joint probabilities P (n x n, zero diagonal, sums to 1) with
/// each conditional row calibrated to `perplexity` by binary search.
Eigen::MatrixXd tsne_affinities(const Eigen::MatrixXd& x, double perplexity);

/// Exact 2-D t-SNE. Requires n >= 5, perplexity < (n - 1) / 3 and inputs
/// that are not all identical.
TsneResult tsne(const Eigen::MatrixXd& x, const TsneConfig& config = {});

}  // namespace abusekit
