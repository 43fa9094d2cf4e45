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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "abusekit/classifier.hpp"
#include "abusekit/dataset.hpp"
#include "abusekit/embedding_store.hpp"
#include "abusekit/fusion.hpp"
#include "abusekit/metrics.hpp"
#include "abusekit/mlp.hpp"
#include "abusekit/tsne.hpp"
#include "json.hpp"

namespace abusekit {

enum class ClassifierKind { kAc, kSc, kTsp };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view text);

struct ExperimentConfig {
  std::string language;  // empty keeps every language
  std::set<Modality> modalities{Modality::kAudio, Modality::kEmotion, Modality::kText};
  ClassifierKind classifier = ClassifierKind::kAc;
  bool use_pca = true;
  double variance_target = kDefaultVarianceTarget;
  double split_ratio = 0.7;
  std::uint64_t seed = 0;
  std::filesystem::path manifest;
  std::filesystem::path audio_store;
  std::filesystem::path text_store;
  std::filesystem::path emotion_cache;
  ml::TrainConfig train;  // seed is taken from `seed`

  void validate() const;
  nlohmann::json to_json() const;
  /// Unknown keys are rejected. Relative paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
};

std::string modality_set_name(const std::set<Modality>& modalities);
std::set<Modality> parse_modality_set(std::string_view text);

/// Assigns every unassigned record to train or test so that each
/// (language, label) group keeps round(ratio * size) records in train.
/// Records that already carry a split are left untouched.
DatasetManifest stratified_split(const DatasetManifest& manifest, double ratio, std::uint64_t seed);

/// Pooled per-modality vectors for one side of the split, rows in manifest order.
struct SplitData {
  std::vector<std::string> ids;
  ml::Labels labels;
  std::map<Modality, Eigen::MatrixXd> inputs;
};

struct PreparedData {
  SplitData train;
  SplitData test;
};

/// Loads the manifest, filters the language, splits, and gathers pooled
/// vectors for the configured modalities.
PreparedData prepare_data(const ExperimentConfig& config);

/// Classifier input for one split: fused vectors (AC, SC) or raw text (TSP).
Eigen::MatrixXd classifier_inputs(const ExperimentConfig& config, const SplitData& data, const FusionModel* fusion);

FusionModel fit_experiment_fusion(const ExperimentConfig& config, const PreparedData& data);

std::unique_ptr<ml::BinaryClassifier> train_classifier(const ExperimentConfig& config, const Eigen::MatrixXd& x,
                                                       std::span<const int> y);

struct EvalReport {
  ExperimentConfig config;
  Metrics metrics;
  Eigen::Index fused_dim = 0;
  std::map<Modality, Eigen::Index> components;  // retained PCA components per modality
  std::size_t n_train = 0;
  std::vector<std::string> test_ids;
  std::optional<double> seconds;  // only serialized when set

  nlohmann::json to_json() const;
};

EvalReport evaluate(const ExperimentConfig& config, const PreparedData& data, const FusionModel* fusion,
                    const ml::BinaryClassifier& model);

EvalReport run_experiment(const ExperimentConfig& config);

/// Unimodal, trimodal-AC and trimodal-SC runs sharing one split.
struct AblationResult {
  std::vector<EvalReport> runs;

  /// language,audio,emo,text,all-AC,all-SC (unimodal columns take the
  /// better of AC and SC), values rounded to 2 decimals.
  std::string table_csv() const;
  /// language,modality_set,classifier,use_pca,accuracy,f1,seed
  std::string runs_csv() const;
};

AblationResult run_ablation(const ExperimentConfig& base);

std::string format_fixed(double value, int decimals = 2);

/// id,x,y,label rows.
std::string tsne_csv(std::span<const std::string> ids, const Eigen::MatrixXd& embedding, std::span<const int> labels);

}  // namespace abusekit
