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


#include "abusekit/embedding_store.hpp"

#include <cstring>
#include <fstream>
#include <set>

#include "abusekit/binary_io.hpp"
#include "abusekit/error.hpp"
#include "json.hpp"

namespace abusekit {
namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Modality modality) {
  switch (modality) {
    case Modality::kAudio:
      return "audio";
    case Modality::kEmotion:
      return "emotion";
    case Modality::kText:
      return "text";
  }
  return "?";
}

Modality parse_modality(std::string_view text) {
  if (text == "audio") return Modality::kAudio;
  if (text == "emotion" || text == "emo") return Modality::kEmotion;
  if (text == "text") return Modality::kText;
  throw ParseError("unknown modality '" + std::string(text) + "'");
}

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& frames) {
  if (frames.rows() == 0 || frames.cols() == 0) throw InvalidArgument("mean_pool of an empty matrix");
  return frames.colwise().mean().transpose();
}

Eigen::VectorXd mean_pool(const FloatMatrix& frames) {
  if (frames.rows() == 0 || frames.cols() == 0) throw InvalidArgument("mean_pool of an empty matrix");
  return frames.cast<double>().colwise().mean().transpose();
}

EmbeddingStore::EmbeddingStore(fs::path dir, Modality modality, Eigen::Index dim,
                               std::map<std::string, Entry> entries)
    : dir_(std::move(dir)), modality_(modality), dim_(dim), entries_(entries.begin(), entries.end()) {}

bool EmbeddingStore::contains(std::string_view id) const { return entries_.find(id) != entries_.end(); }

std::vector<std::string> EmbeddingStore::ids() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

EmbeddingRecord EmbeddingStore::read(std::string_view id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw NotFoundError("no " + std::string(to_string(modality_)) + " embedding for id '" + std::string(id) + "'");
  }
  const auto values = read_f32_file(dir_ / it->second.file);
  const auto expected = static_cast<std::size_t>(it->second.frames * dim_);
  if (values.size() != expected) {
    throw ParseError("embedding '" + std::string(id) + "' has " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(expected));
  }
  EmbeddingRecord rec;
  rec.id = std::string(id);
  rec.modality = modality_;
  rec.data = Eigen::Map<const FloatMatrix>(values.data(), it->second.frames, dim_);
  if (!rec.data.allFinite()) throw ParseError("embedding '" + std::string(id) + "' contains non-finite values");
  return rec;
}

Eigen::VectorXd EmbeddingStore::pooled(std::string_view id) const { return mean_pool(read(id).data); }

EmbeddingStore read_store(const fs::path& dir, Modality modality) {
  const fs::path index_path = dir / "index.json";
  if (!fs::exists(index_path)) throw NotFoundError("store index not found: " + index_path.string());
  json index;
  try {
    index = json::parse(read_text_file(index_path));
  } catch (const json::exception& e) {
    throw ParseError(index_path.string() + ": " + e.what());
  }
  try {
    const auto declared = parse_modality(index.at("modality").get<std::string>());
    if (declared != modality) {
      throw ParseError("store " + dir.string() + " holds " + std::string(to_string(declared)) + " embeddings, expected " +
                       std::string(to_string(modality)));
    }
    const auto dim = index.at("dim").get<Eigen::Index>();
    if (dim <= 0) throw ParseError("store dim must be positive");
    std::map<std::string, EmbeddingStore::Entry> entries;
    for (const auto& [id, e] : index.at("entries").items()) {
      EmbeddingStore::Entry entry{e.at("file").get<std::string>(), e.value("frames", Eigen::Index{1})};
      if (entry.frames <= 0) throw ParseError("entry '" + id + "' has no frames");
      const fs::path file = dir / entry.file;
      std::error_code ec;
      const auto size = fs::file_size(file, ec);
      if (ec) throw NotFoundError("embedding file for id '" + id + "' missing: " + file.string());
      if (size != static_cast<std::uintmax_t>(entry.frames * dim) * sizeof(float)) {
        throw ParseError("embedding file for id '" + id + "' has " + std::to_string(size) + " bytes, expected " +
                         std::to_string(entry.frames * dim * 4) + " (dim mismatch?)");
      }
      entries.emplace(id, std::move(entry));
    }
    return EmbeddingStore(dir, modality, dim, std::move(entries));
  } catch (const json::exception& e) {
    throw ParseError(index_path.string() + ": " + e.what());
  }
}

std::string store_file_name(std::string_view id, Modality modality) {
  std::string name;
  for (char c : id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    name += safe ? c : '_';
  }
  if (name.empty() || name.front() == '.') name.insert(name.begin(), '_');
  return name + (modality == Modality::kEmotion ? ".emo.f32" : ".f32");
}

void write_store(std::span<const EmbeddingRecord> records, const fs::path& dir) {
  Eigen::Index dim = 0;
  std::set<std::string> ids;
  const Modality modality = records.empty() ? Modality::kAudio : records.front().modality;
  for (const auto& r : records) {
    if (r.frames() <= 0 || r.dim() <= 0) throw InvalidArgument("record '" + r.id + "' is empty");
    if (dim == 0) dim = r.dim();
    if (r.dim() != dim) {
      throw InvalidArgument("record '" + r.id + "' has dim " + std::to_string(r.dim()) + ", store dim is " +
                            std::to_string(dim));
    }
    if (r.modality != modality) throw InvalidArgument("record '" + r.id + "' has a different modality");
    if (!r.data.allFinite()) throw InvalidArgument("record '" + r.id + "' contains non-finite values");
    if (!ids.insert(r.id).second) throw InvalidArgument("duplicate record id '" + r.id + "'");
  }

  fs::create_directories(dir);
  json entries = json::object();
  std::set<std::string> used;
  for (const auto& r : records) {
    std::string file = store_file_name(r.id, r.modality);
    for (int n = 1; used.contains(file); ++n) file = std::to_string(n) + "_" + store_file_name(r.id, r.modality);
    used.insert(file);
    const fs::path path = dir / file;
    atomic_write(path, [&](const fs::path& tmp) {
      write_f32_file(tmp, std::span<const float>(r.data.data(), static_cast<std::size_t>(r.data.size())));
    });
    entries[r.id] = {{"file", file}, {"frames", r.frames()}};
  }
  const json index = {{"modality", std::string(to_string(modality))}, {"dim", dim}, {"entries", entries}};
  atomic_write_text(dir / "index.json", index.dump(2) + "\n");
}

FloatMatrix read_npy(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0) {
    throw ParseError(path.string() + ": not a .npy file");
  }
  const int major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0, offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<unsigned char>(bytes[9]) << 8);
    offset = 10;
  } else {
    if (bytes.size() < 12) throw ParseError(path.string() + ": truncated .npy header");
    for (int i = 0; i < 4; ++i) header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    offset = 12;
  }
  if (offset + header_len > bytes.size()) throw ParseError(path.string() + ": truncated .npy header");
  const std::string header = bytes.substr(offset, header_len);
  const std::size_t data_start = offset + header_len;

  auto field = [&](const std::string& key) {
    const auto k = header.find("'" + key + "'");
    if (k == std::string::npos) throw ParseError(path.string() + ": .npy header lacks " + key);
    return header.substr(header.find(':', k) + 1);
  };
  const std::string descr = field("descr");
  const bool f4 = descr.find("'<f4'") != std::string::npos;
  const bool f8 = descr.find("'<f8'") != std::string::npos;
  if (!f4 && !f8) throw ParseError(path.string() + ": only little-endian float32/float64 .npy is supported");
  if (field("fortran_order").find("True") < field("fortran_order").find(',')) {
    throw ParseError(path.string() + ": Fortran-ordered .npy is not supported");
  }
  const std::string shape_text = field("shape");
  const auto open = shape_text.find('('), close = shape_text.find(')');
  std::vector<Eigen::Index> shape;
  std::string num;
  for (std::size_t i = open + 1; i <= close; ++i) {
    const char c = shape_text[i];
    if (c >= '0' && c <= '9') {
      num += c;
    } else if (!num.empty()) {
      shape.push_back(std::stoll(num));
      num.clear();
    }
  }
  if (shape.empty() || shape.size() > 2) throw ParseError(path.string() + ": .npy must be 1-D or 2-D");
  const Eigen::Index rows = shape.size() == 1 ? 1 : shape[0];
  const Eigen::Index cols = shape.size() == 1 ? shape[0] : shape[1];
  const std::size_t width = f4 ? 4 : 8;
  const std::size_t need = static_cast<std::size_t>(rows * cols) * width;
  if (bytes.size() - data_start < need) throw ParseError(path.string() + ": truncated .npy data");
  const auto* raw = reinterpret_cast<const std::uint8_t*>(bytes.data() + data_start);
  FloatMatrix out(rows, cols);
  if (f4) {
    const auto v = decode_f32_le({raw, need});
    std::copy(v.begin(), v.end(), out.data());
  } else {
    const auto v = decode_f64_le({raw, need});
    for (std::size_t i = 0; i < v.size(); ++i) out.data()[i] = static_cast<float>(v[i]);
  }
  return out;
}

}  // namespace abusekit
