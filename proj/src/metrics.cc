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

#include <string>

#include "abusekit/error.hpp"

namespace abusekit {

namespace {

ClassMetrics class_metrics(long tp, long fp, long fn) {
  ClassMetrics m;
  m.support = tp + fn;
  m.precision = tp + fp > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace

double accuracy_from_confusion(const ConfusionCounts& c) {
  if (c.total() == 0) throw InvalidArgument("empty confusion matrix");
  return 100.0 * static_cast<double>(c.true_positive + c.true_negative) / static_cast<double>(c.total());
}

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgument("predictions (" + std::to_string(predictions.size()) + ") and labels (" +
                          std::to_string(labels.size()) + ") differ in length");
  }
  if (labels.empty()) throw InvalidArgument("metrics need at least one prediction");
  Metrics m;
  auto& c = m.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int p = predictions[i], t = labels[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) throw InvalidArgument("labels must be 0 or 1");
    if (p == 1 && t == 1) ++c.true_positive;
    if (p == 0 && t == 0) ++c.true_negative;
    if (p == 1 && t == 0) ++c.false_positive;
    if (p == 0 && t == 1) ++c.false_negative;
  }
  m.accuracy = accuracy_from_confusion(c);
  m.per_class[1] = class_metrics(c.true_positive, c.false_positive, c.false_negative);
  m.per_class[0] = class_metrics(c.true_negative, c.false_negative, c.false_positive);
  m.macro_f1 = 0.5 * (m.per_class[0].f1 + m.per_class[1].f1);
  return m;
}

}  // namespace abusekit
