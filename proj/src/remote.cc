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


#include <cmath>

#include "abusekit/binary_io.hpp"
#include "abusekit/embedding_store.hpp"
#include "abusekit/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace abusekit {
using nlohmann::json;

std::string encode_wire(const EmbeddingRecord& record) {
  const auto bytes = encode_f32_le(std::span<const float>(record.data.data(), static_cast<std::size_t>(record.data.size())));
  const json doc = {{"id", record.id},
                    {"modality", std::string(to_string(record.modality))},
                    {"dim", record.dim()},
                    {"frames", record.frames()},
                    {"data_b64", base64_encode(bytes)}};
  return doc.dump();
}

EmbeddingRecord decode_wire(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ParseError(std::string("embedding response is not valid JSON: ") + e.what());
  }
  try {
    EmbeddingRecord rec;
    rec.id = doc.at("id").get<std::string>();
    rec.modality = parse_modality(doc.at("modality").get<std::string>());
    const auto dim = doc.at("dim").get<Eigen::Index>();
    const auto frames = doc.at("frames").get<Eigen::Index>();
    if (dim <= 0 || frames <= 0) throw ParseError("embedding response has non-positive dim/frames");
    const auto values = decode_f32_le(base64_decode(doc.at("data_b64").get<std::string>()));
    if (values.size() != static_cast<std::size_t>(dim * frames)) {
      throw ParseError("embedding response carries " + std::to_string(values.size()) + " floats, expected " +
                       std::to_string(dim * frames));
    }
    rec.data = Eigen::Map<const FloatMatrix>(values.data(), frames, dim);
    if (!rec.data.allFinite()) throw ParseError("embedding response contains non-finite values");
    return rec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("embedding response schema mismatch: ") + e.what());
  }
}

namespace {

// Splits "http://host:port/prefix" into the client origin and path prefix.
std::pair<std::string, std::string> split_base_url(std::string_view base) {
  const auto scheme_end = base.find("://");
  if (scheme_end == std::string_view::npos) throw InvalidArgument("base URL needs a scheme: " + std::string(base));
  if (base.substr(0, scheme_end) != "http") {
    throw InvalidArgument("only http:// embedding services are supported: " + std::string(base));
  }
  const auto path_start = base.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(base), ""};
  std::string prefix(base.substr(path_start));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {std::string(base.substr(0, path_start)), prefix};
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

}  // namespace

EmbeddingRecord fetch_remote(std::string_view base_url, std::string_view id, Modality modality,
                             const RemoteOptions& options) {
  const auto [origin, prefix] = split_base_url(base_url);
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());

  const std::string path = prefix + "/embeddings/" + std::string(to_string(modality)) + "/" + url_encode(id);
  const auto res = client.Get(path);
  if (!res) {
    throw IoError("embedding request for '" + std::string(id) + "' failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 404) throw NotFoundError("embedding not found for id '" + std::string(id) + "'");
  if (res->status != 200) {
    throw IoError("embedding request for '" + std::string(id) + "' returned HTTP " + std::to_string(res->status));
  }
  EmbeddingRecord rec = decode_wire(res->body);
  if (rec.id != id) throw ParseError("embedding response id '" + rec.id + "' does not match '" + std::string(id) + "'");
  if (rec.modality != modality) throw ParseError("embedding response modality mismatch for '" + rec.id + "'");
  return rec;
}

}  // namespace abusekit
