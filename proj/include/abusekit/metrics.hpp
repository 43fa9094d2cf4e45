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

#include <span>

namespace abusekit {

struct ConfusionCounts {
  long true_positive = 0;
  long true_negative = 0;
  long false_positive = 0;
  long false_negative = 0;

  long total() const { return true_positive + true_negative + false_positive + false_negative; }
};

struct ClassMetrics {
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
  double f1 = 0.0;         // percent
  long support = 0;
};

/// Percentages, full precision. Per-class entries are indexed by label.
struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionCounts confusion;
  ClassMetrics per_class[2];
};

/// Accuracy and macro F1 (mean of the two per-class F1 scores; a class's
/// F1 is 0 when it has neither support nor predictions).
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

/// Accuracy implied by a confusion matrix, in percent.
double accuracy_from_confusion(const ConfusionCounts& counts);

}  // namespace abusekit
