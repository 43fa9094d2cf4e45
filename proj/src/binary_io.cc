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


#include "abusekit/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "abusekit/error.hpp"

namespace abusekit {
namespace fs = std::filesystem;

namespace {

template <typename T>
std::vector<T> decode_le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % sizeof(T) != 0) {
    throw ParseError("byte length " + std::to_string(bytes.size()) +
                     " is not a multiple of " + std::to_string(sizeof(T)));
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), bytes.data(), bytes.size());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::array<std::uint8_t, sizeof(T)> tmp;
      for (std::size_t b = 0; b < sizeof(T); ++b) tmp[b] = bytes[i * sizeof(T) + sizeof(T) - 1 - b];
      std::memcpy(&out[i], tmp.data(), sizeof(T));
    }
  }
  return out;
}

template <typename T>
std::vector<std::uint8_t> encode_le(std::span<const T> values) {
  std::vector<std::uint8_t> out(values.size() * sizeof(T));
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), values.data(), out.size());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::array<std::uint8_t, sizeof(T)> tmp;
      std::memcpy(tmp.data(), &values[i], sizeof(T));
      for (std::size_t b = 0; b < sizeof(T); ++b) out[i * sizeof(T) + b] = tmp[sizeof(T) - 1 - b];
    }
  }
  return out;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::vector<float> decode_f32_le(std::span<const std::uint8_t> bytes) { return decode_le<float>(bytes); }
std::vector<double> decode_f64_le(std::span<const std::uint8_t> bytes) { return decode_le<double>(bytes); }
std::vector<std::uint8_t> encode_f32_le(std::span<const float> values) { return encode_le(values); }
std::vector<std::uint8_t> encode_f64_le(std::span<const double> values) { return encode_le(values); }

std::vector<float> read_f32_file(const fs::path& path) { return decode_f32_le(read_bytes(path)); }
std::vector<double> read_f64_file(const fs::path& path) { return decode_f64_le(read_bytes(path)); }

void write_f32_file(const fs::path& path, std::span<const float> values) {
  write_bytes(path, encode_f32_le(values));
}
void write_f64_file(const fs::path& path, std::span<const double> values) {
  write_bytes(path, encode_f64_le(values));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        if (!last || j < 2) throw ParseError("misplaced base64 padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw ParseError("misplaced base64 padding");
      const int d = decode_char(c);
      if (d < 0) throw ParseError(std::string("invalid base64 character '") + c + "'");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

std::string encode_f64_blob(std::span<const double> values) {
  return base64_encode(encode_f64_le(values));
}

std::vector<double> decode_f64_blob(std::string_view text) {
  return decode_f64_le(base64_decode(text));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const fs::path& path, const std::function<void(const fs::path&)>& fill) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    fill(tmp);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

void atomic_write_text(const fs::path& path, std::string_view text) {
  atomic_write(path, [&](const fs::path& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  });
}

}  // namespace abusekit
