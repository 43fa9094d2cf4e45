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
#include <chrono>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abusekit {

enum class Modality { kAudio, kEmotion, kText };

std::string_view to_string(Modality modality);
Modality parse_modality(std::string_view text);

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Precomputed encoder output for one utterance: frames x dim, or a single
/// pre-pooled frame.
struct EmbeddingRecord {
  std::string id;
  Modality modality = Modality::kAudio;
  FloatMatrix data;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

/// Column-wise arithmetic mean over frames. Throws on an empty matrix.
Eigen::VectorXd mean_pool(const Eigen::MatrixXd& frames);
Eigen::VectorXd mean_pool(const FloatMatrix& frames);

/// Read-only view of a store directory (`index.json` + raw LE float32 files).
/// Records are loaded on demand.
class EmbeddingStore {
 public:
  struct Entry {
    std::string file;
    Eigen::Index frames = 0;
  };

  EmbeddingStore() = default;
  EmbeddingStore(std::filesystem::path dir, Modality modality, Eigen::Index dim, std::map<std::string, Entry> entries);

  Modality modality() const { return modality_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::string_view id) const;
  std::vector<std::string> ids() const;
  const std::filesystem::path& directory() const { return dir_; }

  EmbeddingRecord read(std::string_view id) const;
  /// mean_pool(read(id).data) in double precision.
  Eigen::VectorXd pooled(std::string_view id) const;

 private:
  std::filesystem::path dir_;
  Modality modality_ = Modality::kAudio;
  Eigen::Index dim_ = 0;
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Opens and validates a store: every indexed file must exist with exactly
/// frames * dim * 4 bytes, and the index modality must match.
EmbeddingStore read_store(const std::filesystem::path& dir, Modality modality);

/// Writes all records plus `index.json`. Dims and modality are validated
/// before any file is touched.
void write_store(std::span<const EmbeddingRecord> records, const std::filesystem::path& dir);

/// File name used for a record id: unsafe characters replaced, `.emo.f32`
/// suffix for the emotion cache and `.f32` otherwise.
std::string store_file_name(std::string_view id, Modality modality);

/// Reads a C-order `.npy` array of float32/float64, 1-D (one frame) or 2-D.
FloatMatrix read_npy(const std::filesystem::path& path);

// Remote embedding service client.

struct RemoteOptions {
  std::chrono::milliseconds timeout{30'000};
};

/// JSON wire document for one record (`data_b64` = base64 of LE float32).
std::string encode_wire(const EmbeddingRecord& record);
/// Validates shape, modality and finiteness; throws ParseError otherwise.
EmbeddingRecord decode_wire(std::string_view body);

/// GET <base_url>/embeddings/<modality>/<id>.
EmbeddingRecord fetch_remote(std::string_view base_url, std::string_view id, Modality modality,
                             const RemoteOptions& options = {});

}  // namespace abusekit
