// Copyright 2026 The srattack Authors
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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "srattack/errors.hpp"
#include "srattack/label.hpp"

namespace srattack {

/// One detector verdict: P(image is fake) plus the ground truth.
struct DetectionScore {
  double score = 0.0;  // in [0, 1]
  Label label = Label::kPristine;
  std::string entry_id;
};

/// Fake = positive class.
struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  long fakes() const { return tp + fn; }
  long pristine() const { return tn + fp; }
};

/// All rates as fractions in [0, 1]; render with percent() for table output.
struct MetricsReport {
  double fnr = 0.0;
  double fpr = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
};

/// Threshold the scores: predict fake iff score > threshold (strict, so a
/// fake scoring exactly the threshold counts as a miss).
inline ConfusionCounts confusion(const std::vector<DetectionScore>& scores,
                                 double threshold) {
  if (scores.empty()) {
    throw InvalidArgumentError("confusion: empty score list");
  }
  ConfusionCounts c;
  for (const auto& s : scores) {
    const bool predicted_fake = s.score > threshold;
    if (s.label == Label::kFake) {
      predicted_fake ? ++c.tp : ++c.fn;
    } else {
      predicted_fake ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

/// Area under the ROC curve via the Mann-Whitney rank statistic: the
/// fraction of (fake, pristine) pairs ranked correctly, ties worth 0.5.
inline double auc(const std::vector<DetectionScore>& scores) {
  long n_fake = 0, n_pristine = 0;
  for (const auto& s : scores) (s.label == Label::kFake ? n_fake : n_pristine)++;
  if (n_fake == 0 || n_pristine == 0) {
    throw InvalidArgumentError("auc: both classes must be present, got " +
                               std::to_string(n_fake) + " fake / " +
                               std::to_string(n_pristine) + " pristine");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].score < scores[b].score;
  });

  // Average ranks across tie groups, accumulate the fake-class rank sum.
  double fake_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]].score == scores[order[i]].score) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (scores[order[k]].label == Label::kFake) fake_rank_sum += avg_rank;
    }
    i = j;
  }
  const double u = fake_rank_sum - 0.5 * static_cast<double>(n_fake) * (n_fake + 1);
  return u / (static_cast<double>(n_fake) * static_cast<double>(n_pristine));
}

/// Fold counts + AUC into the report. Requires both classes present.
/// recall is kept exactly complementary to fnr; precision defaults to 1 when
/// nothing was predicted fake.
inline MetricsReport compute_metrics(const ConfusionCounts& c, double auc_value) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) {
    throw InvalidArgumentError("compute_metrics: negative counts");
  }
  if (c.fakes() == 0 || c.pristine() == 0) {
    throw InvalidArgumentError("compute_metrics: a class is absent (fakes=" +
                               std::to_string(c.fakes()) + ", pristine=" +
                               std::to_string(c.pristine()) + ")");
  }
  MetricsReport r;
  r.fnr = static_cast<double>(c.fn) / static_cast<double>(c.fakes());
  r.recall = 1.0 - r.fnr;
  r.fpr = static_cast<double>(c.fp) / static_cast<double>(c.pristine());
  r.precision = (c.tp + c.fp) == 0
                    ? 1.0
                    : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  r.auc = auc_value;
  return r;
}

/// Fraction -> "94.5"-style percent string: one decimal, rounded half away
/// from zero (the paper-table convention).
inline std::string percent(double fraction) {
  const double scaled = fraction * 1000.0;  // tenths of a percent
  const long long tenths = std::llround(scaled);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%lld", tenths / 10, std::llabs(tenths % 10));
  return buf;
}

}  // namespace srattack
