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


#include "abusekit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "abusekit/binary_io.hpp"
#include "abusekit/error.hpp"

namespace abusekit {
namespace fs = std::filesystem;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kTest:
      return "test";
    case Split::kUnassigned:
      break;
  }
  return "";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  if (text.empty()) return Split::kUnassigned;
  throw ParseError("unknown split '" + std::string(text) + "'");
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const UtteranceRecord& r) { return r.split == split; }));
}

DatasetManifest DatasetManifest::filter_language(std::string_view language) const {
  DatasetManifest out;
  out.language_filter = std::string(language);
  for (const auto& r : records) {
    if (language.empty() || r.language == language) out.records.push_back(r);
  }
  return out;
}

const UtteranceRecord* DatasetManifest::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

namespace {

// Minimal RFC 4180 field splitter: quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote at line " + std::to_string(line_no));
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  static constexpr std::string_view kColumns[] = {"id", "audio_path", "label", "language", "split"};
  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  std::unordered_map<std::string, std::size_t> column;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_done = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    auto fields = split_csv_line(line, line_no);
    if (!header_done) {
      for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
      for (auto name : kColumns) {
        if (!column.contains(std::string(name))) {
          throw ParseError("manifest header missing column '" + std::string(name) + "' at line " +
                           std::to_string(line_no));
        }
      }
      if (fields.size() != column.size()) throw ParseError("duplicate header column at line 1");
      header_done = true;
      continue;
    }
    if (fields.size() != column.size()) {
      throw ParseError("expected " + std::to_string(column.size()) + " fields, got " +
                       std::to_string(fields.size()) + " at line " + std::to_string(line_no));
    }

    UtteranceRecord rec;
    rec.id = fields[column["id"]];
    if (rec.id.empty()) throw ParseError("missing id at line " + std::to_string(line_no));
    if (!seen.insert(rec.id).second) {
      throw ParseError("duplicate id '" + rec.id + "' at line " + std::to_string(line_no));
    }
    const std::string& label = fields[column["label"]];
    if (label == "0") {
      rec.label = 0;
    } else if (label == "1") {
      rec.label = 1;
    } else {
      throw ParseError("label '" + label + "' outside {0,1} at line " + std::to_string(line_no));
    }
    const std::string& audio = fields[column["audio_path"]];
    if (!audio.empty()) {
      fs::path p(audio);
      rec.audio_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    rec.language = fields[column["language"]];
    try {
      rec.split = parse_split(fields[column["split"]]);
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
    manifest.records.push_back(std::move(rec));
  }
  if (!header_done) throw ParseError("manifest is empty (no header)");
  if (manifest.records.empty()) throw ParseError("manifest has no records");
  return manifest;
}

DatasetManifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("manifest not found: " + path.string());
  return parse_manifest(read_text_file(path), path.parent_path());
}

std::string format_manifest(const DatasetManifest& manifest, const fs::path& base_dir) {
  std::ostringstream out;
  out << "id,audio_path,label,language,split\n";
  for (const auto& r : manifest.records) {
    std::string audio;
    if (!r.audio_path.empty()) {
      audio = base_dir.empty() ? r.audio_path.generic_string()
                               : r.audio_path.lexically_proximate(base_dir).generic_string();
    }
    out << csv_field(r.id) << ',' << csv_field(audio) << ',' << r.label << ',' << csv_field(r.language) << ','
        << to_string(r.split) << '\n';
  }
  return out.str();
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  atomic_write_text(path, format_manifest(manifest, path.parent_path()));
}

// ---------------------------------------------------------------------------
// WAV

namespace {

std::uint16_t le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) | (static_cast<unsigned char>(p[1]) << 8));
}
std::uint32_t le32(const char* p) {
  return static_cast<std::uint32_t>(le16(p)) | (static_cast<std::uint32_t>(le16(p + 2)) << 16);
}

void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>(v >> 8);
}
void put32(std::string& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xffff));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

Waveform decode_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw ParseError("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::string_view data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    const std::uint32_t size = le32(bytes.data() + pos + 4);
    pos += 8;
    if (size > bytes.size() - pos) throw ParseError("truncated WAV chunk '" + std::string(id) + "'");
    if (id == "fmt ") {
      if (size < 16) throw ParseError("fmt chunk too short");
      const char* p = bytes.data() + pos;
      format = le16(p);
      channels = le16(p + 2);
      rate = le32(p + 4);
      bits = le16(p + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw ParseError("extensible fmt chunk too short");
        format = le16(p + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(pos, size);
      have_data = true;
      break;
    }
    pos += size + (size & 1u);
  }
  if (!have_fmt) throw ParseError("WAV has no fmt chunk");
  if (!have_data) throw ParseError("WAV has no data chunk (truncated?)");
  if (channels < 1 || channels > 2) throw ParseError("unsupported channel count " + std::to_string(channels));
  if (rate == 0) throw ParseError("WAV sample rate is zero");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw ParseError("unsupported WAV encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
                     " bits)");
  }
  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  if (data.size() % frame_bytes != 0) throw ParseError("truncated WAV data chunk");
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw ParseError("WAV has no samples");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const char* p = data.data() + i * frame_bytes + c * (bits / 8);
      double v;
      if (pcm16) {
        v = static_cast<std::int16_t>(le16(p)) / 32768.0;
      } else {
        const std::uint32_t raw = le32(p);
        float f;
        std::memcpy(&f, &raw, sizeof f);
        v = f;
      }
      if (!std::isfinite(v)) throw ParseError("non-finite sample in WAV data");
      acc += v;
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

Waveform load_wav(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("audio file not found: " + path.string());
  try {
    return decode_wav(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_wav(const fs::path& path, std::span<const double> interleaved, int channels, int sample_rate,
               WavFormat format) {
  if (channels < 1 || channels > 2) throw InvalidArgument("channels must be 1 or 2");
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  put16(out, static_cast<std::uint16_t>(channels));
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate * channels * (bits / 8)));
  put16(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  put16(out, bits);
  out += "data";
  put32(out, data_bytes);
  for (double v : interleaved) {
    if (format == WavFormat::kPcm16) {
      const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const float f = static_cast<float>(v);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      put32(out, raw);
    }
  }
  atomic_write_text(path, out);
}

void write_wav_f32(const fs::path& path, const Waveform& wave) {
  write_wav(path, wave.samples, 1, wave.sample_rate, WavFormat::kFloat32);
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr double kCutoffFraction = 0.9;
constexpr double kZeroCrossings = 32.0;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform resample(const Waveform& wave, int target_rate) {
  if (target_rate <= 0) throw InvalidArgument("target sample rate must be positive");
  if (wave.sample_rate <= 0) throw InvalidArgument("source sample rate must be positive");
  if (target_rate == wave.sample_rate) return wave;

  const auto src = static_cast<std::int64_t>(wave.sample_rate);
  const auto dst = static_cast<std::int64_t>(target_rate);
  const auto n_in = static_cast<std::int64_t>(wave.samples.size());
  const auto n_out = static_cast<std::int64_t>(std::llround(static_cast<double>(n_in) * dst / src));

  // Cutoff in cycles per input sample.
  const double cutoff = kCutoffFraction * 0.5 * static_cast<double>(std::min(src, dst)) / static_cast<double>(src);
  const double half_width = kZeroCrossings / (2.0 * cutoff);
  const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);

  const auto kernel = [&](double d) {
    const double u = d / half_width;
    if (std::abs(u) >= 1.0) return 0.0;
    const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) / i0_beta;
    return 2.0 * cutoff * sinc(2.0 * cutoff * d) * window;
  };

  // Output positions fall on dst/gcd distinct fractional phases; tabulate the
  // taps per phase when that table stays small.
  const std::int64_t g = std::gcd(src, dst);
  const std::int64_t phases = dst / g;
  const auto reach = static_cast<std::int64_t>(std::ceil(half_width)) + 1;
  const std::int64_t taps = 2 * reach + 1;
  std::vector<double> table;
  if (phases * taps <= (std::int64_t{1} << 22)) {
    table.resize(static_cast<std::size_t>(phases * taps));
    for (std::int64_t p = 0; p < phases; ++p) {
      const double frac = static_cast<double>(p * g) / static_cast<double>(dst);
      for (std::int64_t k = -reach; k <= reach; ++k) {
        table[static_cast<std::size_t>(p * taps + k + reach)] = kernel(frac - static_cast<double>(k));
      }
    }
  }

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (std::int64_t j = 0; j < n_out; ++j) {
    const std::int64_t num = j * src;
    const std::int64_t base = num / dst;
    const std::int64_t rem = num % dst;
    const double frac = static_cast<double>(rem) / static_cast<double>(dst);
    double acc = 0.0;
    const std::int64_t lo = std::max<std::int64_t>(0, base - reach);
    const std::int64_t hi = std::min<std::int64_t>(n_in - 1, base + reach);
    if (!table.empty()) {
      const double* row = table.data() + (rem / g) * taps + reach - base;
      for (std::int64_t i = lo; i <= hi; ++i) acc += wave.samples[static_cast<std::size_t>(i)] * row[i];
    } else {
      for (std::int64_t i = lo; i <= hi; ++i) {
        acc += wave.samples[static_cast<std::size_t>(i)] * kernel(frac + static_cast<double>(base - i));
      }
    }
    out.samples[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace abusekit
