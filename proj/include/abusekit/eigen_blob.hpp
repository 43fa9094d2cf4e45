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
#include <string>
#include <string_view>
#include <vector>

#include "abusekit/binary_io.hpp"
#include "abusekit/error.hpp"

namespace abusekit {

// base64 float64 blobs for Eigen values; matrices are row-major.

inline std::string to_blob(const Eigen::VectorXd& v) {
  return encode_f64_blob(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

inline std::string to_blob(const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return encode_f64_blob(std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())));
}

inline Eigen::VectorXd vector_from_blob(std::string_view blob, Eigen::Index size) {
  const auto v = decode_f64_blob(blob);
  if (static_cast<Eigen::Index>(v.size()) != size) {
    throw ParseError("blob has " + std::to_string(v.size()) + " values, expected " + std::to_string(size));
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), size);
}

inline Eigen::MatrixXd matrix_from_blob(std::string_view blob, Eigen::Index rows, Eigen::Index cols) {
  const auto v = decode_f64_blob(blob);
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) {
    throw ParseError("blob has " + std::to_string(v.size()) + " values, expected " + std::to_string(rows * cols));
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(v.data(), rows, cols);
}

}  // namespace abusekit
