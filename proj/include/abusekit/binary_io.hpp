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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abusekit {

// Raw little-endian float arrays. These are the on-disk format of the
// embedding store, the emotion cache and the golden test vectors.
std::vector<float> read_f32_file(const std::filesystem::path& path);
std::vector<double> read_f64_file(const std::filesystem::path& path);
void write_f32_file(const std::filesystem::path& path, std::span<const float> values);
void write_f64_file(const std::filesystem::path& path, std::span<const double> values);

std::vector<float> decode_f32_le(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_f32_le(std::span<const float> values);
std::vector<double> decode_f64_le(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_f64_le(std::span<const double> values);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ParseError on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// base64 of little-endian float64, the parameter blob format of model files.
std::string encode_f64_blob(std::span<const double> values);
std::vector<double> decode_f64_blob(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through `fill` into a sibling temp file, then renames over `path`,
/// so a failure never leaves a partial artifact behind.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(const std::filesystem::path&)>& fill);
void atomic_write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace abusekit
