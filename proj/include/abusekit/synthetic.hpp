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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace abusekit {

/// XOR-structured embeddings dataset: one bit is carried by the audio
/// embeddings, another by the emotion vectors, and the label is their XOR,
/// so neither modality alone is informative.
///
/// Within a modality the leading signal dimensions hold +-1 copies of the
/// bit, each copy flipped independently per frame; the remaining dimensions
/// are a low-rank nuisance (shared latent factors through fixed loadings)
/// plus a little isotropic noise, so that the vectors resemble correlated
/// real features rather than white noise.
struct XorDatasetConfig {
  std::size_t samples = 600;
  std::string language = "syn";
  int audio_dim = 32;
  int audio_frames = 16;
  int audio_signal_dims = 8;
  int emotion_dim = 193;
  int emotion_signal_dims = 13;
  int text_dim = 768;
  /// Each signal value independently shows the flipped bit with this probability.
  double flip_probability = 0.15;
  /// Gaussian jitter on signal values.
  double signal_noise = 0.3;
  /// Number of latent factors behind the nuisance dimensions.
  int nuisance_rank = 3;
  /// Isotropic noise on nuisance dimensions.
  double nuisance_noise = 0.1;
  std::uint64_t seed = 0;
};

struct XorDatasetPaths {
  std::filesystem::path manifest;
  std::filesystem::path audio_store;
  std::filesystem::path emotion_cache;
  std::filesystem::path text_store;
};

/// Writes manifest.csv, audio/, emotion/ and text/ under `dir`. Labels are
/// balanced; the text store holds pure noise.
XorDatasetPaths write_xor_dataset(const std::filesystem::path& dir, const XorDatasetConfig& config = {});

}  // namespace abusekit
