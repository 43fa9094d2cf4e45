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

#include <cmath>
#include <numbers>
#include <sstream>

#include "abusekit/binary_io.hpp"
#include "abusekit/dsp.hpp"
#include "abusekit/error.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace abusekit;

TEST_CASE("manifest with three rows parses labels in order") {
  const auto m = parse_manifest(
      "id,audio_path,label,language,split\n"
      "u1,a/u1.wav,0,hi,train\n"
      "u2,a/u2.wav,1,hi,test\n"
      "u3,,0,ta,\n",
      "/data");
  REQUIRE(m.size() == 3);
  CHECK(m.records[0].label == 0);
  CHECK(m.records[1].label == 1);
  CHECK(m.records[2].label == 0);
  CHECK(m.records[0].audio_path == std::filesystem::path("/data/a/u1.wav"));
  CHECK(m.records[2].audio_path.empty());
  CHECK(m.records[1].split == Split::kTest);
  CHECK(m.records[2].split == Split::kUnassigned);
  CHECK(m.filter_language("hi").size() == 2);
  CHECK(m.count(Split::kTrain) == 1);
  REQUIRE(m.find("u3") != nullptr);
  CHECK(m.find("u3")->language == "ta");
}

TEST_CASE("manifest columns may appear in any order and fields may be quoted") {
  const auto m = parse_manifest("label,id,split,language,audio_path\n1,\"u,1\",train,hi,\"x.wav\"\n");
  REQUIRE(m.size() == 1);
  CHECK(m.records[0].id == "u,1");
  CHECK(m.records[0].label == 1);
}

TEST_CASE("manifest errors name the offending line") {
  const std::string header = "id,audio_path,label,language,split\n";
  try {
    parse_manifest(header + "u1,,0,hi,\nu2,,1,hi,\nu1,,1,hi,\n");
    FAIL("expected a duplicate id error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate id 'u1' at line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_manifest(header + "u1,,2,hi,\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest(header + ",,1,hi,\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest(header + "u1,,1,hi\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("id,label\nu1,0\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest(""), ParseError);
}

TEST_CASE("1200-row manifest round-trips through save and load") {
  testing::TempDir dir("manifest");
  DatasetManifest m;
  for (int i = 0; i < 1200; ++i) {
    m.records.push_back({"utt" + std::to_string(i), dir.path() / ("w" + std::to_string(i) + ".wav"), i % 2, "hi",
                         Split::kUnassigned});
  }
  save_manifest(dir / "m.csv", m);
  const auto back = load_manifest(dir / "m.csv");
  REQUIRE(back.size() == 1200);
  CHECK(back.records[17].id == "utt17");
  CHECK(back.records[17].audio_path == m.records[17].audio_path);
  CHECK(back.records[17].label == 1);
}

TEST_CASE("16-bit constant 16384 decodes to 0.5") {
  testing::TempDir dir("wav16");
  std::vector<double> samples(100, 0.5);
  write_wav(dir / "c.wav", samples, 1, 16000, WavFormat::kPcm16);
  const auto w = load_wav(dir / "c.wav");
  CHECK(w.sample_rate == 16000);
  REQUIRE(w.size() == 100);
  for (double s : w.samples) CHECK(s == 0.5);
}

TEST_CASE("stereo is mixed down by an unweighted channel mean") {
  testing::TempDir dir("wavst");
  std::vector<double> interleaved;
  for (int i = 0; i < 50; ++i) {
    interleaved.push_back(1.0);
    interleaved.push_back(0.0);
  }
  write_wav(dir / "s.wav", interleaved, 2, 22050, WavFormat::kFloat32);
  const auto w = load_wav(dir / "s.wav");
  REQUIRE(w.size() == 50);
  for (double s : w.samples) CHECK(s == 0.5);
}

TEST_CASE("committed sine fixture has one second at 22050 Hz") {
  const auto w = load_wav(testing::fixture_path("sine440_22050.wav"));
  CHECK(w.sample_rate == 22050);
  CHECK(w.size() == 22050);
}

TEST_CASE("truncated and unsupported WAV files are rejected") {
  testing::TempDir dir("wavbad");
  write_wav(dir / "ok.wav", std::vector<double>(1000, 0.1), 1, 8000, WavFormat::kPcm16);
  const std::string bytes = read_text_file(dir / "ok.wav");
  CHECK(decode_wav(bytes).size() == 1000);
  CHECK_THROWS_AS(decode_wav(bytes.substr(0, bytes.size() - 501)), ParseError);
  CHECK_THROWS_AS(decode_wav(bytes.substr(0, 30)), ParseError);
  CHECK_THROWS_AS(decode_wav("RIFX" + bytes.substr(4)), ParseError);
  std::string eight_bit = bytes;
  eight_bit[34] = 8;  // bits per sample
  CHECK_THROWS_AS(decode_wav(eight_bit), ParseError);
}

TEST_CASE("resampling to the same rate is the identity") {
  Waveform w{{0.1, -0.2, 0.3, 0.4}, 22050};
  const auto r = resample(w, 22050);
  CHECK(r.samples == w.samples);
  CHECK(r.sample_rate == 22050);
}

TEST_CASE("resampling preserves DC away from the edges") {
  Waveform w{std::vector<double>(44100, 0.25), 44100};
  const auto r = resample(w, 22050);
  REQUIRE(r.size() == 22050);
  for (std::size_t i = 200; i + 200 < r.size(); ++i) CHECK(std::abs(r.samples[i] - 0.25) < 1e-3);
}

TEST_CASE("resampling keeps a 440 Hz tone at 440 Hz") {
  Waveform w{std::vector<double>(44100), 44100};
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] = std::sin(2.0 * std::numbers::pi * 440.0 * i / 44100.0);
  const auto r = resample(w, 22050);
  auto peak_hz = [](const Waveform& x) {
    const auto s = dsp::stft(x);
    Eigen::Index bin = 0;
    s.magnitudes.row(s.magnitudes.rows() / 2).maxCoeff(&bin);
    return s.bin_frequency(bin);
  };
  // One bin is 21.5 Hz at 44.1 kHz and 10.8 Hz at 22.05 kHz.
  CHECK(std::abs(peak_hz(w) - 440.0) < 11.0);
  CHECK(std::abs(peak_hz(r) - 440.0) < 6.0);
}
