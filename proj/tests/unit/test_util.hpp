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
#include <filesystem>
#include <string>
#include <vector>

namespace abusekit::testing {

std::filesystem::path data_dir();
std::filesystem::path fixture_path(const std::string& name);

/// Golden array from the generated manifest, reshaped row-major to its
/// recorded shape (1-D arrays become a column vector).
struct Golden {
  std::vector<long> shape;
  Eigen::MatrixXd values;
};
Golden load_golden(const std::string& key);

/// max |a - b|
double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Two well-separated Gaussian blobs in `dim` dimensions, label = blob.
void gaussian_blobs(int n, int dim, double separation, std::uint64_t seed, Eigen::MatrixXd& x, std::vector<int>& y);

}  // namespace abusekit::testing
