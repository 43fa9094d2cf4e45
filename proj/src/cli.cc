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


#include "abusekit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "abusekit/binary_io.hpp"
#include "abusekit/dsp.hpp"
#include "abusekit/error.hpp"
#include "abusekit/experiments.hpp"
#include "abusekit/log.hpp"
#include "abusekit/synthetic.hpp"

namespace abusekit::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Config file contents: experiment settings plus IO-only fields.
struct CliConfig {
  ExperimentConfig experiment;
  fs::path out;
  fs::path cache_dir;
  std::string log_level;
};

CliConfig load_cli_config(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("config not found: " + path.string());
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(path.string() + ": config must be a JSON object");
  const fs::path base = path.parent_path();
  CliConfig c;
  auto take_path = [&](const char* key) -> fs::path {
    if (!doc.contains(key)) return {};
    fs::path p = doc.at(key).get<std::string>();
    doc.erase(key);
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  c.out = take_path("out");
  c.cache_dir = take_path("cache_dir");
  if (doc.contains("log_level")) {
    c.log_level = doc.at("log_level").get<std::string>();
    doc.erase("log_level");
  }
  c.experiment = ExperimentConfig::from_json(doc, base);
  if (c.experiment.emotion_cache.empty() && !c.cache_dir.empty()) c.experiment.emotion_cache = c.cache_dir / "emotion";
  return c;
}


/// Flags shared by the data-driven subcommands; unset flags keep config values.
struct CommonFlags {
  std::string config;
  std::string manifest, audio_store, text_store, emotion_cache, modalities, classifier, language, out;
  std::optional<std::uint64_t> seed;
  bool no_pca = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Experiment config (JSON)");
    app->add_option("--manifest", manifest, "Dataset manifest CSV");
    app->add_option("--audio-store", audio_store, "Audio embedding store directory");
    app->add_option("--text-store", text_store, "Text embedding store directory");
    app->add_option("--emotion-cache", emotion_cache, "Emotion vector cache directory");
    app->add_option("--modalities", modalities, "Comma-separated subset of audio,emotion,text");
    app->add_option("--classifier", classifier, "ac, sc or tsp")->check(CLI::IsMember({"ac", "sc", "tsp"}));
    app->add_option("--language", language, "Restrict to one language tag");
    app->add_option("--seed", seed, "Random seed");
    app->add_flag("--no-pca", no_pca, "Skip PCA; fuse z-scored vectors");
    app->add_option("--out", out, "Output path");
  }

  CliConfig resolve() const {
    CliConfig c;
    if (!config.empty()) c = load_cli_config(config);
    ExperimentConfig& e = c.experiment;
    if (!manifest.empty()) e.manifest = manifest;
    if (!audio_store.empty()) e.audio_store = audio_store;
    if (!text_store.empty()) e.text_store = text_store;
    if (!emotion_cache.empty()) e.emotion_cache = emotion_cache;
    if (!modalities.empty()) e.modalities = parse_modality_set(modalities);
    if (!classifier.empty()) e.classifier = parse_classifier_kind(classifier);
    if (!language.empty()) e.language = language;
    if (seed) e.seed = *seed;
    if (no_pca) e.use_pca = false;
    if (!out.empty()) c.out = out;
    configure_logging(c.log_level);
    return c;
  }
};

void emit(const fs::path& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    atomic_write_text(path, text);
  }
}

fs::path require_path(const fs::path& path, const char* what) {
  if (path.empty()) throw InvalidArgument(std::string(what) + " is required");
  return path;
}

// ---------------------------------------------------------------------------

int extract_emotion(const CommonFlags& flags, int jobs) {
  const CliConfig c = flags.resolve();
  const fs::path out = c.out.empty() ? c.experiment.emotion_cache : c.out;
  require_path(out, "--out (emotion cache directory)");
  const DatasetManifest manifest =
      load_manifest(require_path(c.experiment.manifest, "--manifest")).filter_language(c.experiment.language);
  std::vector<const UtteranceRecord*> todo;
  for (const auto& r : manifest.records) {
    if (!r.audio_path.empty()) todo.push_back(&r);
  }
  if (todo.empty()) throw InvalidArgument("no manifest records reference audio");
  if (jobs < 1) throw InvalidArgument("--jobs must be at least 1");

  std::vector<EmbeddingRecord> records(todo.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    const dsp::EmotionEncoder encoder;
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        const dsp::EmotionVector v = encoder.encode(load_wav(todo[i]->audio_path));
        records[i] = {todo[i]->id, Modality::kEmotion, v.values.transpose().cast<float>()};
        logger()->debug("emotion vector for {}", todo[i]->id);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = todo.size();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), todo.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  write_store(records, out);
  logger()->info("wrote {} emotion vectors to {}", records.size(), out.string());
  return 0;
}

int import_embeddings(const std::string& modality_name, const fs::path& list, const fs::path& out, Eigen::Index dim) {
  const Modality modality = parse_modality(modality_name);
  const DatasetManifest pairs = [&] {
    // Same CSV conventions as the manifest: id,path with a header.
    const std::string text = read_text_file(list);
    std::istringstream in(text);
    std::string line;
    DatasetManifest m;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (header) {
        if (line != "id,path") throw ParseError(list.string() + ": expected header 'id,path'");
        header = false;
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParseError(list.string() + ": missing path at line " + std::to_string(line_no));
      fs::path p = line.substr(comma + 1);
      if (p.is_relative()) p = list.parent_path() / p;
      m.records.push_back({line.substr(0, comma), p, 0, {}, Split::kUnassigned});
    }
    return m;
  }();
  std::vector<EmbeddingRecord> records;
  for (const auto& r : pairs.records) {
    EmbeddingRecord rec{r.id, modality, {}};
    if (r.audio_path.extension() == ".npy") {
      rec.data = read_npy(r.audio_path);
    } else {
      if (dim <= 0) throw InvalidArgument("--dim is required for raw .f32 inputs");
      const std::vector<float> values = read_f32_file(r.audio_path);
      if (values.empty() || values.size() % static_cast<std::size_t>(dim) != 0) {
        throw ParseError(r.audio_path.string() + ": size is not a multiple of dim " + std::to_string(dim));
      }
      rec.data = Eigen::Map<const FloatMatrix>(values.data(), static_cast<Eigen::Index>(values.size()) / dim, dim);
    }
    records.push_back(std::move(rec));
  }
  write_store(records, out);
  return 0;
}

std::optional<FusionModel> fusion_for(const ExperimentConfig& e, const fs::path& path) {
  if (e.classifier == ClassifierKind::kTsp) return std::nullopt;
  return load_fusion(require_path(path, "--fusion"));
}

int fit_fusion_cmd(const CommonFlags& flags, std::ostream& out) {
  const CliConfig c = flags.resolve();
  const PreparedData data = prepare_data(c.experiment);
  emit(c.out, fusion_to_json(fit_experiment_fusion(c.experiment, data)).dump(2) + "\n", out);
  return 0;
}

int train_cmd(const CommonFlags& flags, const fs::path& fusion_path) {
  const CliConfig c = flags.resolve();
  const PreparedData data = prepare_data(c.experiment);
  const auto fusion = fusion_for(c.experiment, fusion_path);
  const Eigen::MatrixXd x = classifier_inputs(c.experiment, data.train, fusion ? &*fusion : nullptr);
  const auto model = train_classifier(c.experiment, x, data.train.labels);
  save_classifier(require_path(c.out, "--out"), *model);
  return 0;
}

int evaluate_cmd(const CommonFlags& flags, const fs::path& fusion_path, const fs::path& model_path,
                 std::ostream& out) {
  const CliConfig c = flags.resolve();
  const PreparedData data = prepare_data(c.experiment);
  const auto fusion = fusion_for(c.experiment, fusion_path);
  const auto model = ml::load_classifier(require_path(model_path, "--model"));
  const EvalReport report = evaluate(c.experiment, data, fusion ? &*fusion : nullptr, *model);
  emit(c.out, report.to_json().dump(2) + "\n", out);
  return 0;
}

int run_cmd(const CommonFlags& flags, bool timing, std::ostream& out) {
  const CliConfig c = flags.resolve();
  const auto start = std::chrono::steady_clock::now();
  EvalReport report = run_experiment(c.experiment);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  logger()->info("run finished in {:.2f} s", seconds);
  if (timing) report.seconds = seconds;
  emit(c.out, report.to_json().dump(2) + "\n", out);
  return 0;
}

int ablate_cmd(const CommonFlags& flags, const fs::path& runs_out, std::ostream& out) {
  const CliConfig c = flags.resolve();
  const AblationResult result = run_ablation(c.experiment);
  if (!runs_out.empty()) emit(runs_out, result.runs_csv(), out);
  emit(c.out, result.table_csv(), out);
  return 0;
}

int tsne_cmd(const CommonFlags& flags, const TsneConfig& base, bool seed_given, std::ostream& out) {
  const CliConfig c = flags.resolve();
  const DatasetManifest manifest =
      load_manifest(require_path(c.experiment.manifest, "--manifest")).filter_language(c.experiment.language);
  const EmbeddingStore store =
      read_store(require_path(c.experiment.emotion_cache, "--emotion-cache"), Modality::kEmotion);
  std::vector<std::string> ids;
  ml::Labels labels;
  for (const auto& r : manifest.records) {
    if (!store.contains(r.id)) throw NotFoundError("emotion vector missing for id '" + r.id + "'");
    ids.push_back(r.id);
    labels.push_back(r.label);
  }
  if (ids.empty()) throw InvalidArgument("no records to embed");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(ids.size()), store.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = store.pooled(ids[i]).transpose();
  TsneConfig config = base;
  if (!seed_given) config.seed = c.experiment.seed;
  const TsneResult result = tsne(fit_zscore(x).transform(x), config);
  logger()->info("t-SNE KL {:.4f} -> {:.4f}", result.kl_after_exaggeration(config), result.final_kl());
  emit(c.out, tsne_csv(ids, result.embedding, labels), out);
  return 0;
}

int fetch_cmd(const CommonFlags& flags, const std::string& base_url, const std::string& modality_name,
              int timeout_ms) {
  const CliConfig c = flags.resolve();
  const Modality modality = parse_modality(modality_name);
  const DatasetManifest manifest =
      load_manifest(require_path(c.experiment.manifest, "--manifest")).filter_language(c.experiment.language);
  const fs::path out = require_path(c.out, "--out");
  RemoteOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms);
  std::vector<EmbeddingRecord> records;
  for (const auto& r : manifest.records) records.push_back(fetch_remote(base_url, r.id, modality, options));
  write_store(records, out);
  return 0;
}

int synth_cmd(const fs::path& out, const XorDatasetConfig& config) {
  const XorDatasetPaths paths = write_xor_dataset(require_path(out, "--out"), config);
  logger()->info("wrote synthetic dataset manifest {}", paths.manifest.string());
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"abusekit: multimodal abusive-speech detection toolkit", "abusekit"};
  app.require_subcommand(1, 1);

  CommonFlags flags;
  int jobs = 1;
  auto* extract = app.add_subcommand("extract-emotion", "Compute 193-dim emotion vectors for every manifest record");
  flags.attach(extract);
  extract->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string modality = "audio", list, import_out;
  Eigen::Index dim = 0;
  auto* import = app.add_subcommand("import-embeddings", "Build an embedding store from .npy or raw .f32 files");
  import->add_option("--modality", modality, "audio, emotion or text");
  import->add_option("--list", list, "CSV with header id,path")->required();
  import->add_option("--dim", dim, "Embedding width for raw .f32 files");
  import->add_option("--out", import_out, "Store directory")->required();

  auto* fit = app.add_subcommand("fit-fusion", "Fit per-modality z-score and PCA on the training split");
  flags.attach(fit);

  std::string fusion_path, model_path;
  auto* train = app.add_subcommand("train", "Train a classifier on fused training vectors");
  flags.attach(train);
  train->add_option("--fusion", fusion_path, "Fusion model from fit-fusion");

  auto* evaluate_app = app.add_subcommand("evaluate", "Evaluate a trained classifier on the test split");
  flags.attach(evaluate_app);
  evaluate_app->add_option("--fusion", fusion_path, "Fusion model from fit-fusion");
  evaluate_app->add_option("--model", model_path, "Model from train")->required();

  bool timing = false;
  auto* run = app.add_subcommand("run", "Split, fuse, train and evaluate in one step");
  flags.attach(run);
  run->add_flag("--timing", timing, "Include wall-clock seconds in the report");

  std::string runs_out;
  auto* ablate = app.add_subcommand("ablate", "Unimodal and trimodal accuracy table");
  flags.attach(ablate);
  ablate->add_option("--runs-out", runs_out, "Also write every run as CSV");

  TsneConfig tsne_config;
  std::optional<std::uint64_t> tsne_seed;
  auto* tsne_app = app.add_subcommand("tsne", "2-D t-SNE of emotion vectors");
  flags.attach(tsne_app);
  tsne_app->add_option("--perplexity", tsne_config.perplexity, "Target perplexity");
  tsne_app->add_option("--iterations", tsne_config.iterations, "Gradient iterations");

  std::string base_url, fetch_modality = "text";
  int timeout_ms = 30'000;
  auto* fetch = app.add_subcommand("fetch-embeddings", "Download embeddings from a remote service");
  flags.attach(fetch);
  fetch->add_option("--base-url", base_url, "http://host:port")->required();
  fetch->add_option("--modality", fetch_modality, "audio, emotion or text");
  fetch->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);

  XorDatasetConfig synth_config;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic XOR dataset (manifest and stores)");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--samples", synth_config.samples, "Number of records (multiple of 4)");
  synth->add_option("--seed", synth_config.seed, "Random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed()) return extract_emotion(flags, jobs);
    if (import->parsed()) {
      configure_logging({});
      return import_embeddings(modality, list, import_out, dim);
    }
    if (fit->parsed()) return fit_fusion_cmd(flags, out);
    if (train->parsed()) return train_cmd(flags, fusion_path);
    if (evaluate_app->parsed()) return evaluate_cmd(flags, fusion_path, model_path, out);
    if (run->parsed()) return run_cmd(flags, timing, out);
    if (ablate->parsed()) return ablate_cmd(flags, runs_out, out);
    if (tsne_app->parsed()) {
      tsne_config.seed = flags.seed.value_or(0);
      return tsne_cmd(flags, tsne_config, flags.seed.has_value(), out);
    }
    if (fetch->parsed()) return fetch_cmd(flags, base_url, fetch_modality, timeout_ms);
    if (synth->parsed()) {
      configure_logging({});
      return synth_cmd(synth_out, synth_config);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace abusekit::cli
