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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abusekit {

/// Analysis rate every DSP default assumes.
inline constexpr int kAnalysisSampleRate = 22050;

/// Mono PCM audio, samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kAnalysisSampleRate;

  std::size_t size() const { return samples.size(); }
};

enum class Split { kUnassigned, kTrain, kTest };

std::string_view to_string(Split split);
/// Accepts "train", "test" and "" (unassigned).
Split parse_split(std::string_view text);

struct UtteranceRecord {
  std::string id;
  std::filesystem::path audio_path;  // empty for embeddings-only records
  int label = 0;                     // 0 = non-abusive, 1 = abusive
  std::string language;
  Split split = Split::kUnassigned;
};

struct DatasetManifest {
  std::vector<UtteranceRecord> records;
  std::string language_filter;  // empty when every language is kept

  std::size_t size() const { return records.size(); }
  std::size_t count(Split split) const;
  /// Subset restricted to one language tag; empty `language` keeps everything.
  DatasetManifest filter_language(std::string_view language) const;
  const UtteranceRecord* find(std::string_view id) const;
};

/// Parses manifest CSV text (header `id,audio_path,label,language,split`).
/// Relative audio paths are resolved against `base_dir`.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest, const std::filesystem::path& base_dir = {});
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Reads RIFF/WAVE PCM16 or float32, mono or stereo. Stereo is averaged.
Waveform load_wav(const std::filesystem::path& path);
Waveform decode_wav(std::string_view bytes);
enum class WavFormat { kPcm16, kFloat32 };
/// Writes interleaved samples; PCM16 quantizes with x * 32768, clamped.
void write_wav(const std::filesystem::path& path, std::span<const double> interleaved, int channels,
               int sample_rate, WavFormat format);
void write_wav_f32(const std::filesystem::path& path, const Waveform& wave);

/// Kaiser-windowed sinc resampler (beta 8.6, cutoff at 0.9 of the lower
/// Nyquist). Output length is round(len * target / source).
Waveform resample(const Waveform& wave, int target_rate);

}  // namespace abusekit
