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


#include "test_util.hpp"

#include <atomic>
#include <stdexcept>
#include <unistd.h>

#include "abusekit/binary_io.hpp"
#include "abusekit/rng.hpp"
#include "json.hpp"

namespace abusekit::testing {
namespace fs = std::filesystem;

fs::path data_dir() { return ABUSEKIT_TEST_DATA; }

fs::path fixture_path(const std::string& name) { return data_dir() / "fixtures" / name; }

Golden load_golden(const std::string& key) {
  const fs::path dir = data_dir() / "goldens";
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  const auto& entry = manifest.at("fixtures").at(key);
  Golden g;
  g.shape = entry.at("shape").get<std::vector<long>>();
  std::vector<double> flat;
  if (entry.at("dtype").get<std::string>() == "f64") {
    flat = read_f64_file(dir / entry.at("file").get<std::string>());
  } else {
    const auto f = read_f32_file(dir / entry.at("file").get<std::string>());
    flat.assign(f.begin(), f.end());
  }
  const long rows = g.shape.at(0);
  const long cols = g.shape.size() > 1 ? g.shape.at(1) : 1;
  if (static_cast<long>(flat.size()) != rows * cols) throw std::runtime_error("golden size mismatch: " + key);
  g.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(),
                                                                                                      rows, cols);
  return g;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::runtime_error("shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("abusekit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void gaussian_blobs(int n, int dim, double separation, std::uint64_t seed, Eigen::MatrixXd& x, std::vector<int>& y) {
  Rng rng(seed);
  x.resize(n, dim);
  y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    y[static_cast<std::size_t>(i)] = label;
    for (int j = 0; j < dim; ++j) x(i, j) = rng.normal() + (label ? separation : -separation) / 2.0;
  }
}

}  // namespace abusekit::testing
