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


#include "abusekit/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "abusekit/dataset.hpp"
#include "abusekit/embedding_store.hpp"
#include "abusekit/error.hpp"
#include "abusekit/rng.hpp"

namespace abusekit {
namespace fs = std::filesystem;

namespace {

// Generates one modality: `signal` leading dimensions carry the bit, the rest
// follow fixed loadings on `rank` per-sample latent factors.
class ModalityGenerator {
 public:
  ModalityGenerator(int dim, int signal, const XorDatasetConfig& c, Rng& rng)
      : signal_(signal), config_(c), loadings_(dim - signal, std::max(c.nuisance_rank, 0)) {
    for (Eigen::Index i = 0; i < loadings_.rows(); ++i) {
      for (Eigen::Index j = 0; j < loadings_.cols(); ++j) loadings_(i, j) = rng.normal();
    }
  }

  FloatMatrix sample(int frames, int bit, Rng& rng) const {
    Eigen::VectorXd latent(loadings_.cols());
    for (Eigen::Index j = 0; j < latent.size(); ++j) latent(j) = rng.normal();
    const Eigen::VectorXd nuisance = loadings_ * latent;
    FloatMatrix m(frames, signal_ + loadings_.rows());
    for (Eigen::Index f = 0; f < m.rows(); ++f) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double v;
        if (j < signal_) {
          const int shown = rng.uniform() < config_.flip_probability ? 1 - bit : bit;
          v = (shown ? 1.0 : -1.0) + rng.normal(0.0, config_.signal_noise);
        } else {
          v = nuisance(j - signal_) + rng.normal(0.0, config_.nuisance_noise);
        }
        m(f, j) = static_cast<float>(v);
      }
    }
    return m;
  }

 private:
  int signal_;
  const XorDatasetConfig& config_;
  Eigen::MatrixXd loadings_;
};

}  // namespace

XorDatasetPaths write_xor_dataset(const fs::path& dir, const XorDatasetConfig& c) {
  if (c.samples < 4 || c.samples % 4 != 0) throw InvalidArgument("XOR dataset size must be a positive multiple of 4");
  if (c.audio_frames < 1 || c.audio_signal_dims < 1 || c.audio_signal_dims > c.audio_dim ||
      c.emotion_signal_dims < 1 || c.emotion_signal_dims > c.emotion_dim || c.text_dim < 1 || c.nuisance_rank < 0) {
    throw InvalidArgument("invalid XOR dataset dimensions");
  }
  if (!(c.flip_probability >= 0.0 && c.flip_probability < 0.5)) {
    throw InvalidArgument("flip probability must be in [0, 0.5)");
  }
  fs::create_directories(dir);
  XorDatasetPaths paths{dir / "manifest.csv", dir / "audio", dir / "emotion", dir / "text"};

  Rng rng(c.seed);
  const ModalityGenerator audio_gen(c.audio_dim, c.audio_signal_dims, c, rng);
  const ModalityGenerator emotion_gen(c.emotion_dim, c.emotion_signal_dims, c, rng);
  DatasetManifest manifest;
  std::vector<EmbeddingRecord> audio, emotion, text;
  // Equal counts of the four (a, b) combinations, in shuffled order.
  std::vector<int> combos(c.samples);
  for (std::size_t i = 0; i < c.samples; ++i) combos[i] = static_cast<int>(i % 4);
  rng.shuffle(std::span<int>(combos));

  for (std::size_t i = 0; i < c.samples; ++i) {
    const int a = combos[i] & 1, b = (combos[i] >> 1) & 1;
    char id[32];
    std::snprintf(id, sizeof id, "xor%05zu", i);
    manifest.records.push_back({id, {}, a ^ b, c.language, Split::kUnassigned});

    EmbeddingRecord au{id, Modality::kAudio, audio_gen.sample(c.audio_frames, a, rng)};
    EmbeddingRecord em{id, Modality::kEmotion, emotion_gen.sample(1, b, rng)};
    EmbeddingRecord tx{id, Modality::kText, FloatMatrix(1, c.text_dim)};
    for (Eigen::Index j = 0; j < tx.data.cols(); ++j) tx.data(0, j) = static_cast<float>(rng.normal());
    audio.push_back(std::move(au));
    emotion.push_back(std::move(em));
    text.push_back(std::move(tx));
  }
  write_store(audio, paths.audio_store);
  write_store(emotion, paths.emotion_cache);
  write_store(text, paths.text_store);
  save_manifest(paths.manifest, manifest);
  return paths;
}

}  // namespace abusekit
