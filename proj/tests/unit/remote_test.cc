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


#include <thread>

#include "abusekit/embedding_store.hpp"
#include "abusekit/error.hpp"
#include "doctest.h"
#include "httplib.h"

using namespace abusekit;

namespace {

/// Local stub embedding service on an ephemeral port.
class StubServer {
 public:
  StubServer() {
    server_.Get(R"(/embeddings/(\w+)/(.+))", [](const httplib::Request& req, httplib::Response& res) {
      const std::string modality = req.matches[1];
      const std::string id = req.matches[2];
      if (id == "missing") {
        res.status = 404;
        return;
      }
      if (id == "broken") {
        res.status = 500;
        return;
      }
      EmbeddingRecord rec{id, parse_modality(modality), FloatMatrix(2, 4)};
      rec.data << 1, 2, 3, 4, 5, 6, 7, 8;
      std::string body = encode_wire(rec);
      if (id == "truncated") body = body.substr(0, body.size() / 2);
      if (id == "wrongid") body = encode_wire({"other", rec.modality, rec.data});
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("wire format round-trips a record") {
  EmbeddingRecord rec{"u1", Modality::kText, FloatMatrix(1, 3)};
  rec.data << 0.25f, -1.0f, 3.5f;
  const auto back = decode_wire(encode_wire(rec));
  CHECK(back.id == "u1");
  CHECK(back.modality == Modality::kText);
  CHECK(back.data == rec.data);
  CHECK_THROWS_AS(decode_wire(R"({"id":"u1","modality":"text","dim":3,"frames":1})"), ParseError);
  CHECK_THROWS_AS(decode_wire(R"({"id":"u1","modality":"text","dim":4,"frames":1,"data_b64":"AAAAAA=="})"),
                  ParseError);
}

TEST_CASE("fetching from a stub service") {
  StubServer stub;
  const auto rec = fetch_remote(stub.url(), "u 1", Modality::kAudio);
  CHECK(rec.id == "u 1");
  CHECK(rec.dim() == 4);
  CHECK(rec.frames() == 2);
  CHECK(rec.data(1, 3) == 8.0f);

  try {
    fetch_remote(stub.url(), "missing", Modality::kText);
    FAIL("expected not found");
  } catch (const NotFoundError& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  CHECK_THROWS_AS(fetch_remote(stub.url(), "truncated", Modality::kText), ParseError);
  CHECK_THROWS_AS(fetch_remote(stub.url(), "wrongid", Modality::kText), ParseError);
  CHECK_THROWS_AS(fetch_remote(stub.url(), "broken", Modality::kText), IoError);
  CHECK_THROWS_AS(fetch_remote("https://example.invalid", "x", Modality::kText), InvalidArgument);
}

TEST_CASE("an unreachable service fails within the configured timeout") {
  RemoteOptions options;
  options.timeout = std::chrono::milliseconds(300);
  // Port 9 (discard) on loopback is normally closed.
  CHECK_THROWS_AS(fetch_remote("http://127.0.0.1:9", "x", Modality::kText, options), IoError);
}
