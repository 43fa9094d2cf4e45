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
#include <string>

#include "abusekit/error.hpp"
#include "abusekit/rng.hpp"

namespace abusekit {

namespace {

constexpr double kProbabilityFloor = 1e-12;

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::VectorXd norms = x.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * x * x.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

// Conditional distribution of row i for precision beta; returns entropy (nats).
double conditional_row(const Eigen::MatrixXd& d2, Eigen::Index i, double beta, Eigen::VectorXd& row) {
  const Eigen::Index n = d2.rows();
  // Shift by the smallest off-diagonal distance for numerical range.
  double shift = INFINITY;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != i) shift = std::min(shift, d2(i, j));
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    row(j) = j == i ? 0.0 : std::exp(-beta * (d2(i, j) - shift));
    sum += row(j);
  }
  double weighted = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) weighted += row(j) * (d2(i, j) - shift);
  row /= sum;
  return std::log(sum) + beta * weighted / sum;
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (i != j && p(i, j) > 0.0) total += p(i, j) * std::log(p(i, j) / std::max(q(i, j), kProbabilityFloor));
    }
  }
  return total;
}

}  // namespace

double TsneResult::kl_after_exaggeration(const TsneConfig& config) const {
  const auto at = static_cast<std::size_t>(std::clamp(config.exaggeration_iterations, 0, config.iterations));
  return kl_trace.at(at);
}

Eigen::MatrixXd tsne_affinities(const Eigen::MatrixXd& x, double perplexity) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd d2 = squared_distances(x);
  const double target = std::log(perplexity);
  Eigen::MatrixXd conditional = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1.0, lo = 0.0, hi = INFINITY;
    for (int step = 0; step < 200; ++step) {
      const double entropy = conditional_row(d2, i, beta, row);
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    conditional.row(i) = row.transpose();
  }
  Eigen::MatrixXd p = (conditional + conditional.transpose()) / (2.0 * static_cast<double>(n));
  p = p.cwiseMax(kProbabilityFloor);
  p.diagonal().setZero();
  return p / p.sum();
}

TsneResult tsne(const Eigen::MatrixXd& x, const TsneConfig& config) {
  const Eigen::Index n = x.rows();
  if (n < 5) throw InvalidArgument("t-SNE needs at least 5 points, got " + std::to_string(n));
  if (!(config.perplexity > 0.0) || config.perplexity >= static_cast<double>(n - 1) / 3.0) {
    throw InvalidArgument("t-SNE perplexity must be in (0, (n-1)/3)");
  }
  if (config.iterations < 1) throw InvalidArgument("t-SNE needs at least one iteration");
  if (!x.allFinite()) throw InvalidArgument("t-SNE input contains non-finite values");
  if (((x.rowwise() - x.row(0)).cwiseAbs().maxCoeff()) == 0.0) {
    throw InvalidArgument("t-SNE input points are all identical");
  }

  const Eigen::MatrixXd p = tsne_affinities(x, config.perplexity);

  Rng rng(config.seed);
  Eigen::MatrixXd y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < 2; ++c) y(i, c) = rng.normal(0.0, 1e-4);
  }
  Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);

  TsneResult result;
  result.kl_trace.reserve(static_cast<std::size_t>(config.iterations) + 1);
  Eigen::MatrixXd num(n, n), q(n, n), grad(n, 2);
  auto affinities_2d = [&]() {
    num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    q = (num / num.sum()).cwiseMax(kProbabilityFloor);
    q.diagonal().setZero();
  };

  for (int it = 0; it < config.iterations; ++it) {
    if (it == config.exaggeration_iterations) {
      // The second optimization stage starts from a fresh optimizer state.
      velocity.setZero();
      gains.setOnes();
    }
    affinities_2d();
    result.kl_trace.push_back(kl_divergence(p, q));
    const double scale = it < config.exaggeration_iterations ? config.exaggeration : 1.0;
    const Eigen::MatrixXd attraction = ((scale * p) - q).cwiseProduct(num);
    // grad_i = 4 sum_j a_ij (y_i - y_j)
    grad = 4.0 * (attraction.rowwise().sum().asDiagonal() * y - attraction * y);

    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        // Grow the gain while the step keeps opposing the gradient; shrink it otherwise.
        const bool opposing = velocity(i, c) * grad(i, c) < 0.0;
        gains(i, c) = std::max(opposing ? gains(i, c) + 0.2 : gains(i, c) * 0.8, config.min_gain);
      }
    }
    const double momentum = it < config.exaggeration_iterations ? config.initial_momentum : config.final_momentum;
    velocity = momentum * velocity - config.learning_rate * gains.cwiseProduct(grad);
    y += velocity;
  }
  affinities_2d();
  result.kl_trace.push_back(kl_divergence(p, q));
  result.embedding = std::move(y);
  return result;
}

}  // namespace abusekit
