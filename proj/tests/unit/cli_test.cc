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


#include "abusekit/cli.hpp"

#include <fstream>
#include <sstream>

#include "abusekit/binary_io.hpp"
#include "abusekit/dataset.hpp"
#include "abusekit/embedding_store.hpp"
#include "abusekit/synthetic.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace abusekit;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

XorDatasetPaths small_dataset(const std::filesystem::path& dir) {
  XorDatasetConfig c;
  c.samples = 60;
  c.emotion_dim = 20;
  c.audio_dim = 12;
  c.seed = 2;
  return write_xor_dataset(dir, c);
}

void write_config(const std::filesystem::path& path, const nlohmann::json& doc) { std::ofstream(path) << doc.dump(); }

}  // namespace

TEST_CASE("usage errors exit with 2 and print to stderr") {
  auto r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  r = run({"run", "--bogus-flag"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  r = run({});
  CHECK(r.code == 2);
  r = run({"run", "--classifier", "svm"});
  CHECK(r.code == 2);
}

TEST_CASE("domain errors exit with 1") {
  testing::TempDir dir("cli_err");
  auto r = run({"run", "--manifest", (dir / "nope.csv").string(), "--modalities", "audio", "--audio-store",
                (dir / "a").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  write_config(dir / "bad.json", {{"manifest", "m.csv"}, {"colour", "blue"}});
  r = run({"run", "--config", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("run with a config emits the report JSON and is reproducible") {
  testing::TempDir dir("cli_run");
  small_dataset(dir / "data");
  write_config(dir / "exp.json", {{"manifest", "data/manifest.csv"},
                                  {"audio_store", "data/audio"},
                                  {"emotion_cache", "data/emotion"},
                                  {"text_store", "data/text"},
                                  {"modalities", {"audio", "emotion"}},
                                  {"seed", 7},
                                  {"train", {{"epochs", 5}}}});
  const auto first = run({"run", "--config", (dir / "exp.json").string()});
  REQUIRE(first.code == 0);
  const auto doc = nlohmann::json::parse(first.out);
  CHECK(doc.at("config").at("seed") == 7);
  CHECK(doc.at("n_test").get<int>() + doc.at("n_train").get<int>() == 60);
  CHECK(run({"run", "--config", (dir / "exp.json").string()}).out == first.out);

  // Flags override config fields; --out writes the file instead of stdout.
  const auto over = run({"run", "--config", (dir / "exp.json").string(), "--no-pca", "--seed", "8", "--out",
                         (dir / "report.json").string()});
  REQUIRE(over.code == 0);
  CHECK(over.out.empty());
  const auto written = nlohmann::json::parse(read_text_file(dir / "report.json"));
  CHECK(written.at("config").at("use_pca") == false);
  CHECK(written.at("config").at("seed") == 8);

  const auto timed = run({"run", "--config", (dir / "exp.json").string(), "--timing"});
  CHECK(nlohmann::json::parse(timed.out).contains("seconds"));
}

TEST_CASE("fit-fusion, train and evaluate agree with run") {
  testing::TempDir dir("cli_steps");
  const auto p = small_dataset(dir / "data");
  const std::vector<std::string> common = {"--manifest",      p.manifest.string(),     "--audio-store",
                                           p.audio_store.string(), "--emotion-cache", p.emotion_cache.string(),
                                           "--modalities",    "audio,emotion",         "--seed", "3"};
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), common.begin(), common.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return run(head);
  };
  REQUIRE(with({"fit-fusion"}, {"--out", (dir / "fusion.json").string()}).code == 0);
  REQUIRE(with({"train"}, {"--fusion", (dir / "fusion.json").string(), "--out", (dir / "model.json").string()}).code ==
          0);
  const auto eval =
      with({"evaluate"}, {"--fusion", (dir / "fusion.json").string(), "--model", (dir / "model.json").string()});
  REQUIRE(eval.code == 0);
  const auto once = with({"run"}, {});
  REQUIRE(once.code == 0);
  CHECK(nlohmann::json::parse(eval.out) == nlohmann::json::parse(once.out));
}

TEST_CASE("ablate emits a Table-2-shaped CSV") {
  testing::TempDir dir("cli_ablate");
  const auto p = small_dataset(dir / "data");
  const auto r = run({"ablate", "--manifest", p.manifest.string(), "--audio-store", p.audio_store.string(),
                      "--emotion-cache", p.emotion_cache.string(), "--text-store", p.text_store.string(),
                      "--runs-out", (dir / "runs.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("language,audio,emo,text,all-AC,all-SC\n", 0) == 0);
  const std::string runs = read_text_file(dir / "runs.csv");
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 9);
}

TEST_CASE("extract-emotion writes one cache file per record with audio, identically for any --jobs") {
  testing::TempDir dir("cli_extract");
  std::ofstream(dir / "m.csv") << "id,audio_path,label,language,split\n"
                               << "s," << testing::fixture_path("sine440_22050.wav").string() << ",0,en,\n"
                               << "c," << testing::fixture_path("chirp.wav").string() << ",1,en,\n"
                               << "t,,1,en,\n";
  REQUIRE(run({"extract-emotion", "--manifest", (dir / "m.csv").string(), "--out", (dir / "one").string()}).code == 0);
  REQUIRE(run({"extract-emotion", "--manifest", (dir / "m.csv").string(), "--out", (dir / "two").string(), "--jobs",
               "2"})
              .code == 0);
  CHECK(std::filesystem::exists(dir / "one" / "s.emo.f32"));
  CHECK(std::filesystem::exists(dir / "one" / "c.emo.f32"));
  CHECK_FALSE(std::filesystem::exists(dir / "one" / "t.emo.f32"));
  CHECK(read_f32_file(dir / "one" / "c.emo.f32").size() == 193);
  CHECK(read_f32_file(dir / "one" / "c.emo.f32") == read_f32_file(dir / "two" / "c.emo.f32"));

  // A broken audio file fails the command without leaving a cache behind.
  std::ofstream(dir / "bad.wav") << "not a wav";
  std::ofstream(dir / "bad.csv") << "id,audio_path,label,language,split\nb," << (dir / "bad.wav").string()
                                 << ",0,en,\n";
  CHECK(run({"extract-emotion", "--manifest", (dir / "bad.csv").string(), "--out", (dir / "bad").string()}).code == 1);
  CHECK_FALSE(std::filesystem::exists(dir / "bad" / "index.json"));
}

TEST_CASE("import-embeddings builds a store from raw f32 files") {
  testing::TempDir dir("cli_import");
  write_f32_file(dir / "a.f32", std::vector<float>{1, 2, 3, 4, 5, 6});
  write_f32_file(dir / "b.f32", std::vector<float>{7, 8, 9});
  std::ofstream(dir / "list.csv") << "id,path\na,a.f32\nb,b.f32\n";
  const auto r = run({"import-embeddings", "--modality", "text", "--list", (dir / "list.csv").string(), "--dim", "3",
                      "--out", (dir / "store").string()});
  REQUIRE(r.code == 0);
  const auto store = read_store(dir / "store", Modality::kText);
  CHECK(store.size() == 2);
  CHECK(store.read("a").frames() == 2);
  CHECK(store.pooled("a")(0) == 2.5);
}

TEST_CASE("tsne writes id,x,y,label rows") {
  testing::TempDir dir("cli_tsne");
  const auto p = small_dataset(dir / "data");
  const auto r = run({"tsne", "--manifest", p.manifest.string(), "--emotion-cache", p.emotion_cache.string(),
                      "--perplexity", "5", "--iterations", "300", "--out", (dir / "t.csv").string()});
  REQUIRE(r.code == 0);
  const std::string csv = read_text_file(dir / "t.csv");
  CHECK(csv.rfind("id,x,y,label\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
}
