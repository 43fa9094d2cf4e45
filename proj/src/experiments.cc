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


#include "abusekit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "abusekit/error.hpp"
#include "abusekit/log.hpp"
#include "abusekit/rng.hpp"
#include "abusekit/stack.hpp"

namespace abusekit {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kAc:
      return "ac";
    case ClassifierKind::kSc:
      return "sc";
    case ClassifierKind::kTsp:
      return "tsp";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "ac") return ClassifierKind::kAc;
  if (text == "sc") return ClassifierKind::kSc;
  if (text == "tsp") return ClassifierKind::kTsp;
  throw InvalidArgument("unknown classifier '" + std::string(text) + "' (expected ac, sc or tsp)");
}

std::string modality_set_name(const std::set<Modality>& modalities) {
  std::string out;
  for (Modality m : modalities) {
    if (!out.empty()) out += '+';
    out += to_string(m);
  }
  return out;
}

std::set<Modality> parse_modality_set(std::string_view text) {
  if (text == "all") return {Modality::kAudio, Modality::kEmotion, Modality::kText};
  std::set<Modality> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find_first_of(",+", start), text.size());
    const std::string_view part = text.substr(start, end - start);
    if (part.empty()) throw InvalidArgument("empty entry in modality list '" + std::string(text) + "'");
    if (!out.insert(parse_modality(part)).second) {
      throw InvalidArgument("modality '" + std::string(part) + "' listed twice");
    }
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (modalities.empty()) throw InvalidArgument("at least one modality is required");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidArgument("split ratio must be in (0, 1)");
  if (!(variance_target > 0.0 && variance_target <= 1.0)) throw InvalidArgument("variance target must be in (0, 1]");
  if (classifier == ClassifierKind::kTsp && modalities != std::set<Modality>{Modality::kText}) {
    throw InvalidArgument("the tsp classifier consumes text embeddings only (use --modalities text)");
  }
  if (manifest.empty()) throw InvalidArgument("a manifest is required");
  const std::pair<Modality, const fs::path*> sources[] = {
      {Modality::kAudio, &audio_store}, {Modality::kEmotion, &emotion_cache}, {Modality::kText, &text_store}};
  for (const auto& [m, path] : sources) {
    if (modalities.contains(m) && path->empty()) {
      throw InvalidArgument("modality '" + std::string(to_string(m)) + "' needs its store path");
    }
  }
}

json ExperimentConfig::to_json() const {
  json mods = json::array();
  for (Modality m : modalities) mods.push_back(std::string(to_string(m)));
  return {{"language", language},
          {"modalities", mods},
          {"classifier", std::string(to_string(classifier))},
          {"use_pca", use_pca},
          {"variance_target", variance_target},
          {"split_ratio", split_ratio},
          {"seed", seed},
          {"manifest", manifest.generic_string()},
          {"audio_store", audio_store.generic_string()},
          {"text_store", text_store.generic_string()},
          {"emotion_cache", emotion_cache.generic_string()},
          {"train",
           {{"learning_rate", train.learning_rate},
            {"dropout", train.dropout},
            {"batch_size", train.batch_size},
            {"epochs", train.epochs}}}};
}

namespace {

void reject_unknown_keys(const json& doc, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!doc.is_object()) throw ParseError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

fs::path resolve(const json& doc, const char* key, const fs::path& base_dir) {
  if (!doc.contains(key)) return {};
  fs::path p = doc.at(key).get<std::string>();
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc, const fs::path& base_dir) {
  reject_unknown_keys(doc,
                      {"language", "modalities", "classifier", "use_pca", "variance_target", "split_ratio", "seed",
                       "manifest", "audio_store", "text_store", "emotion_cache", "train"},
                      "experiment config");
  try {
    ExperimentConfig c;
    c.language = doc.value("language", c.language);
    if (doc.contains("modalities")) {
      const json& m = doc.at("modalities");
      if (m.is_string()) {
        c.modalities = parse_modality_set(m.get<std::string>());
      } else {
        c.modalities.clear();
        for (const auto& name : m) {
          if (!c.modalities.insert(parse_modality(name.get<std::string>())).second) {
            throw ParseError("modality listed twice in config");
          }
        }
      }
    }
    if (doc.contains("classifier")) c.classifier = parse_classifier_kind(doc.at("classifier").get<std::string>());
    c.use_pca = doc.value("use_pca", c.use_pca);
    c.variance_target = doc.value("variance_target", c.variance_target);
    c.split_ratio = doc.value("split_ratio", c.split_ratio);
    c.seed = doc.value("seed", c.seed);
    c.manifest = resolve(doc, "manifest", base_dir);
    c.audio_store = resolve(doc, "audio_store", base_dir);
    c.text_store = resolve(doc, "text_store", base_dir);
    c.emotion_cache = resolve(doc, "emotion_cache", base_dir);
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      reject_unknown_keys(t, {"learning_rate", "dropout", "batch_size", "epochs", "beta1", "beta2", "epsilon"},
                          "train config");
      c.train = ml::TrainConfig::from_json(t);
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Data preparation

DatasetManifest stratified_split(const DatasetManifest& manifest, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must be in (0, 1)");
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> groups;
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.split != Split::kUnassigned) continue;
    groups[{r.language, r.label}].push_back(i);
    seen[r.label] = true;
  }
  DatasetManifest out = manifest;
  if (groups.empty()) return out;
  if (!seen[0] || !seen[1]) throw InvalidArgument("stratified split needs both classes among unassigned records");
  Rng rng(seed);
  for (auto& [key, indices] : groups) {
    rng.shuffle(std::span<std::size_t>(indices));
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(indices.size())));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      out.records[indices[k]].split = k < n_train ? Split::kTrain : Split::kTest;
    }
  }
  return out;
}

namespace {

const fs::path& store_path(const ExperimentConfig& c, Modality m) {
  switch (m) {
    case Modality::kAudio:
      return c.audio_store;
    case Modality::kEmotion:
      return c.emotion_cache;
    case Modality::kText:
      break;
  }
  return c.text_store;
}

Eigen::MatrixXd gather(const EmbeddingStore& store, const std::vector<std::string>& ids) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), store.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!store.contains(ids[i])) {
      throw NotFoundError(std::string(to_string(store.modality())) + " embedding missing for id '" + ids[i] +
                          "' in " + store.directory().string());
    }
    out.row(static_cast<Eigen::Index>(i)) = store.pooled(ids[i]).transpose();
  }
  return out;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
  config.validate();
  DatasetManifest manifest = load_manifest(config.manifest).filter_language(config.language);
  if (manifest.records.empty()) throw InvalidArgument("no records for language '" + config.language + "'");
  manifest = stratified_split(manifest, config.split_ratio, config.seed);

  PreparedData data;
  for (const auto& r : manifest.records) {
    SplitData& side = r.split == Split::kTrain ? data.train : data.test;
    side.ids.push_back(r.id);
    side.labels.push_back(r.label);
  }
  if (data.train.ids.empty() || data.test.ids.empty()) throw InvalidArgument("train and test splits must be non-empty");
  for (Modality m : config.modalities) {
    const EmbeddingStore store = read_store(store_path(config, m), m);
    data.train.inputs[m] = gather(store, data.train.ids);
    data.test.inputs[m] = gather(store, data.test.ids);
  }
  return data;
}

Eigen::MatrixXd classifier_inputs(const ExperimentConfig& config, const SplitData& data, const FusionModel* fusion) {
  if (config.classifier == ClassifierKind::kTsp) {
    const Eigen::MatrixXd& text = data.inputs.at(Modality::kText);
    if (text.cols() != ml::kTspInputDim) {
      throw InvalidArgument("tsp expects " + std::to_string(ml::kTspInputDim) + "-dim text embeddings, got " +
                            std::to_string(text.cols()));
    }
    return text;
  }
  if (fusion == nullptr) throw InvalidArgument("a fusion model is required for the " +
                                               std::string(to_string(config.classifier)) + " classifier");
  return apply_fusion(*fusion, data.inputs);
}

FusionModel fit_experiment_fusion(const ExperimentConfig& config, const PreparedData& data) {
  return fit_fusion(data.train.inputs, config.use_pca, config.variance_target);
}

std::unique_ptr<ml::BinaryClassifier> train_classifier(const ExperimentConfig& config, const Eigen::MatrixXd& x,
                                                       std::span<const int> y) {
  ml::TrainConfig train = config.train;
  train.seed = config.seed;
  switch (config.classifier) {
    case ClassifierKind::kAc:
      return std::make_unique<ml::Mlp>(ml::train_ac(x, y, train));
    case ClassifierKind::kTsp:
      return std::make_unique<ml::Mlp>(ml::train_tsp(x, y, train));
    case ClassifierKind::kSc:
      break;
  }
  return std::make_unique<ml::StackClassifier>(ml::train_stack(x, y, config.seed));
}

json EvalReport::to_json() const {
  const auto& c = metrics.confusion;
  json per_class = json::object();
  for (int label = 0; label < 2; ++label) {
    const auto& m = metrics.per_class[label];
    per_class[std::to_string(label)] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  json comps = json::object();
  for (const auto& [m, k] : components) comps[std::string(to_string(m))] = k;
  json doc = {{"config", config.to_json()},
              {"n_train", n_train},
              {"n_test", test_ids.size()},
              {"fused_dim", fused_dim},
              {"components", comps},
              {"accuracy", metrics.accuracy},
              {"f1", metrics.macro_f1},
              {"per_class", per_class},
              {"confusion", {{"tp", c.true_positive}, {"tn", c.true_negative}, {"fp", c.false_positive},
                             {"fn", c.false_negative}}},
              {"test_ids", test_ids}};
  if (seconds) doc["seconds"] = *seconds;
  return doc;
}

EvalReport evaluate(const ExperimentConfig& config, const PreparedData& data, const FusionModel* fusion,
                    const ml::BinaryClassifier& model) {
  const Eigen::MatrixXd x = classifier_inputs(config, data.test, fusion);
  const ml::Labels predicted = model.predict(x);
  EvalReport report;
  report.config = config;
  report.metrics = compute_metrics(predicted, data.test.labels);
  report.fused_dim = x.cols();
  if (fusion != nullptr && config.classifier != ClassifierKind::kTsp) {
    for (const auto& t : fusion->modalities) {
      if (t.pca) report.components[t.modality] = t.pca->k;
    }
  }
  report.n_train = data.train.ids.size();
  report.test_ids = data.test.ids;
  return report;
}

namespace {

EvalReport run_prepared(const ExperimentConfig& config, const PreparedData& data) {
  std::optional<FusionModel> fusion;
  if (config.classifier != ClassifierKind::kTsp) fusion = fit_experiment_fusion(config, data);
  const FusionModel* f = fusion ? &*fusion : nullptr;
  const Eigen::MatrixXd x = classifier_inputs(config, data.train, f);
  const auto model = train_classifier(config, x, data.train.labels);
  EvalReport report = evaluate(config, data, f, *model);
  logger()->info("{} {} {}: accuracy {:.2f} f1 {:.2f}", config.language.empty() ? "*" : config.language,
               modality_set_name(config.modalities), to_string(config.classifier), report.metrics.accuracy,
               report.metrics.macro_f1);
  return report;
}

PreparedData subset(const PreparedData& data, const std::set<Modality>& modalities) {
  PreparedData out;
  out.train.ids = data.train.ids;
  out.train.labels = data.train.labels;
  out.test.ids = data.test.ids;
  out.test.labels = data.test.labels;
  for (Modality m : modalities) {
    out.train.inputs[m] = data.train.inputs.at(m);
    out.test.inputs[m] = data.test.inputs.at(m);
  }
  return out;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& config) { return run_prepared(config, prepare_data(config)); }

AblationResult run_ablation(const ExperimentConfig& base) {
  const std::set<Modality> all{Modality::kAudio, Modality::kEmotion, Modality::kText};
  ExperimentConfig everything = base;
  everything.modalities = all;
  everything.classifier = ClassifierKind::kAc;
  const PreparedData data = prepare_data(everything);

  AblationResult result;
  const std::set<Modality> sets[] = {{Modality::kAudio}, {Modality::kEmotion}, {Modality::kText}, all};
  for (const auto& set : sets) {
    for (ClassifierKind kind : {ClassifierKind::kAc, ClassifierKind::kSc}) {
      ExperimentConfig c = base;
      c.modalities = set;
      c.classifier = kind;
      result.runs.push_back(run_prepared(c, subset(data, set)));
    }
  }
  return result;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string AblationResult::table_csv() const {
  std::ostringstream out;
  out << "language,audio,emo,text,all-AC,all-SC\n";
  if (runs.empty()) return out.str();
  auto best = [&](Modality m) {
    double value = -1.0;
    for (const auto& r : runs) {
      if (r.config.modalities == std::set<Modality>{m}) value = std::max(value, r.metrics.accuracy);
    }
    return value;
  };
  auto fused = [&](ClassifierKind kind) {
    for (const auto& r : runs) {
      if (r.config.modalities.size() == 3 && r.config.classifier == kind) return r.metrics.accuracy;
    }
    return -1.0;
  };
  const std::string& language = runs.front().config.language;
  out << (language.empty() ? "all" : language) << ',' << format_fixed(best(Modality::kAudio)) << ','
      << format_fixed(best(Modality::kEmotion)) << ',' << format_fixed(best(Modality::kText)) << ','
      << format_fixed(fused(ClassifierKind::kAc)) << ',' << format_fixed(fused(ClassifierKind::kSc)) << '\n';
  return out.str();
}

std::string AblationResult::runs_csv() const {
  std::ostringstream out;
  out << "language,modality_set,classifier,use_pca,accuracy,f1,seed\n";
  for (const auto& r : runs) {
    out << (r.config.language.empty() ? "all" : r.config.language) << ',' << modality_set_name(r.config.modalities)
        << ',' << to_string(r.config.classifier) << ',' << (r.config.use_pca ? "true" : "false") << ','
        << format_fixed(r.metrics.accuracy) << ',' << format_fixed(r.metrics.macro_f1) << ',' << r.config.seed
        << '\n';
  }
  return out.str();
}

std::string tsne_csv(std::span<const std::string> ids, const Eigen::MatrixXd& embedding, std::span<const int> labels) {
  if (ids.size() != static_cast<std::size_t>(embedding.rows()) || labels.size() != ids.size() ||
      embedding.cols() != 2) {
    throw InvalidArgument("t-SNE CSV inputs disagree in size");
  }
  std::ostringstream out;
  out << "id,x,y,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << ids[i] << ',' << format_fixed(embedding(r, 0), 6) << ',' << format_fixed(embedding(r, 1), 6) << ','
        << labels[i] << '\n';
  }
  return out.str();
}

}  // namespace abusekit
