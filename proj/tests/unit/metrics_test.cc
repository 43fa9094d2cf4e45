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


#include "abusekit/metrics.hpp"

#include <vector>

#include "abusekit/error.hpp"
#include "doctest.h"

using namespace abusekit;

TEST_CASE("perfect predictions score 100") {
  const std::vector<int> labels = {0, 1, 1, 0};
  const auto m = compute_metrics(labels, labels);
  CHECK(m.accuracy == 100.0);
  CHECK(m.macro_f1 == 100.0);
}

TEST_CASE("all-one predictions on balanced labels") {
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  const std::vector<int> predictions(6, 1);
  const auto m = compute_metrics(predictions, labels);
  CHECK(m.accuracy == doctest::Approx(50.0));
  CHECK(m.per_class[0].f1 == 0.0);
  CHECK(m.per_class[1].f1 == doctest::Approx(200.0 / 3.0));
  CHECK(m.macro_f1 == doctest::Approx(100.0 / 3.0));
}

TEST_CASE("counting example and confusion consistency") {
  const std::vector<int> predictions = {1, 0, 1, 1};
  const std::vector<int> labels = {1, 0, 0, 1};
  const auto m = compute_metrics(predictions, labels);
  CHECK(m.accuracy == 75.0);
  CHECK(m.confusion.true_positive == 2);
  CHECK(m.confusion.true_negative == 1);
  CHECK(m.confusion.false_positive == 1);
  CHECK(m.confusion.false_negative == 0);
  CHECK(m.confusion.total() == 4);
  CHECK(std::abs(accuracy_from_confusion(m.confusion) - m.accuracy) < 1e-9);
  CHECK(m.per_class[1].precision == doctest::Approx(200.0 / 3.0));
  CHECK(m.per_class[1].recall == 100.0);
  CHECK(m.per_class[0].support == 2);
}

TEST_CASE("a class with no support and no predictions contributes zero F1") {
  const std::vector<int> ones(5, 1);
  const auto m = compute_metrics(ones, ones);
  CHECK(m.accuracy == 100.0);
  CHECK(m.per_class[0].f1 == 0.0);
  CHECK(m.macro_f1 == 50.0);
}

TEST_CASE("length mismatch and bad labels are errors") {
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{1, 0}, std::vector<int>{1}), InvalidArgument);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{2}, std::vector<int>{1}), InvalidArgument);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
}
