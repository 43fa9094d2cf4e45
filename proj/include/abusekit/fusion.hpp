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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abusekit/embedding_store.hpp"
#include "json.hpp"

namespace abusekit {

inline constexpr double kStdFloor = 1e-8;
inline constexpr double kDefaultVarianceTarget = 0.95;

struct ZScoreParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // population std, floored at kStdFloor

  Eigen::Index dim() const { return mean.size(); }
  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  /// Row-wise transform of an n x dim matrix.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
};

/// Per-dimension mean and population std of an n x dim training matrix.
ZScoreParams fit_zscore(const Eigen::MatrixXd& train);

/// Principal axes of the training covariance (divisor n - 1). The full
/// spectrum is kept; only the first `k` components are used for projection.
struct PCAModel {
  Eigen::VectorXd mean;                      // dim
  Eigen::MatrixXd components;                // k x dim, orthonormal rows
  Eigen::VectorXd explained_variance;        // every eigenvalue, descending
  Eigen::VectorXd explained_variance_ratio;  // every ratio, sums to 1
  Eigen::Index k = 0;

  Eigen::Index input_dim() const { return mean.size(); }
  double retained_ratio() const { return explained_variance_ratio.head(k).sum(); }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd project(const Eigen::MatrixXd& rows) const;
};

/// Smallest k whose cumulative ratio reaches `variance_target`, capped at
/// min(n - 1, dim). Each component's largest-magnitude entry is positive.
PCAModel fit_pca(const Eigen::MatrixXd& train, double variance_target = kDefaultVarianceTarget);

struct ModalityTransform {
  Modality modality = Modality::kAudio;
  ZScoreParams zscore;
  std::optional<PCAModel> pca;

  Eigen::Index input_dim() const { return zscore.dim(); }
  Eigen::Index output_dim() const { return pca ? pca->k : zscore.dim(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

/// Fitted per-modality transforms, always ordered audio, emotion, text.
struct FusionModel {
  std::vector<ModalityTransform> modalities;
  double variance_target = kDefaultVarianceTarget;

  Eigen::Index fused_dim() const;
  std::vector<Modality> modality_order() const;
};

/// Fits z-score (+ PCA when `use_pca`) on each modality's training matrix.
FusionModel fit_fusion(const std::map<Modality, Eigen::MatrixXd>& train, bool use_pca,
                       double variance_target = kDefaultVarianceTarget);

Eigen::VectorXd apply_fusion(const FusionModel& model, const std::map<Modality, Eigen::VectorXd>& vectors);
/// Batched form: every matrix holds one row per sample.
Eigen::MatrixXd apply_fusion(const FusionModel& model, const std::map<Modality, Eigen::MatrixXd>& rows);

nlohmann::json fusion_to_json(const FusionModel& model);
FusionModel fusion_from_json(const nlohmann::json& doc);
void save_fusion(const std::filesystem::path& path, const FusionModel& model);
FusionModel load_fusion(const std::filesystem::path& path);

}  // namespace abusekit
