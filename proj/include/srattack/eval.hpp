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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srattack/attack.hpp"
#include "srattack/detector_dnn.hpp"
#include "srattack/io_image.hpp"
#include "srattack/manifest.hpp"
#include "srattack/metrics.hpp"
#include "srattack/parallel.hpp"

namespace srattack {

struct ScoreRunResult {
  std::vector<DetectionScore> scores;  // stably ordered by entry_id
  long skipped_no_face = 0;
  std::vector<std::pair<std::string, std::string>> errors;  // (entry_id, what)
};

/// Score every non-skipped entry with one detector instance per worker.
inline ScoreRunResult score_dataset(const DatasetManifest& manifest,
                                    const DetectorFactory& factory, int jobs = 0) {
  manifest.validate();
  const std::size_t n = manifest.entries.size();
  const int workers = jobs > 0 ? jobs : default_jobs();

  struct Slot {
    std::optional<DetectionScore> score;
    std::string error;
    bool skipped = false;
  };
  std::vector<Slot> slots(n);
  std::vector<std::unique_ptr<Detector>> detectors(
      static_cast<std::size_t>(std::max(1, workers)));

  parallel_for(n, workers, [&](std::size_t i, int worker) {
    const ManifestEntry& entry = manifest.entries[i];
    if (entry.skipped_no_face) {
      slots[i].skipped = true;
      return;
    }
    auto& det = detectors[static_cast<std::size_t>(worker)];
    if (!det) det = factory();  // BackendUnavailableError propagates
    try {
      const double s = det->score(load_image(entry.path));
      if (s < 0.0 || s > 1.0) {
        throw Error("detector returned out-of-range score " + std::to_string(s));
      }
      slots[i].score = DetectionScore{s, entry.label, entry.entry_id};
    } catch (const BackendUnavailableError&) {
      throw;
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
  });

  ScoreRunResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i].skipped) ++result.skipped_no_face;
    else if (!slots[i].error.empty()) {
      result.errors.emplace_back(manifest.entries[i].entry_id, slots[i].error);
    } else if (slots[i].score) {
      result.scores.push_back(std::move(*slots[i].score));
    }
  }
  std::stable_sort(result.scores.begin(), result.scores.end(),
                   [](const auto& a, const auto& b) { return a.entry_id < b.entry_id; });
  return result;
}

/// Frame-level metrics treat each scored image as one sample. Video-majority
/// folds the frames of each source_video into one sample whose score is the
/// fraction of frames voting fake (strict majority decides).
enum class Aggregation { kFrame, kVideoMajority };

inline const char* aggregation_name(Aggregation a) {
  return a == Aggregation::kFrame ? "frame" : "video-majority";
}

inline Aggregation parse_aggregation(const std::string& s) {
  if (s == "frame") return Aggregation::kFrame;
  if (s == "video-majority" || s == "video_majority") return Aggregation::kVideoMajority;
  throw InvalidArgumentError("unknown aggregation '" + s + "'");
}

/// Collapse frame scores into per-video vote fractions. Entries without a
/// source_video stay singleton samples. Videos with inconsistent labels are
/// rejected.
inline std::vector<DetectionScore> aggregate_video_majority(
    const std::vector<DetectionScore>& frame_scores, const DatasetManifest& manifest,
    double frame_threshold) {
  std::map<std::string, const ManifestEntry*> by_id;
  for (const auto& e : manifest.entries) by_id[e.entry_id] = &e;

  struct Group {
    Label label;
    long votes = 0;
    long total = 0;
  };
  std::map<std::string, Group> groups;
  for (const auto& s : frame_scores) {
    const auto it = by_id.find(s.entry_id);
    if (it == by_id.end()) {
      throw InvalidArgumentError("aggregate: score for unknown entry '" + s.entry_id +
                                 "'");
    }
    const std::string key =
        it->second->source_video ? *it->second->source_video : "entry:" + s.entry_id;
    auto [g, inserted] = groups.try_emplace(key, Group{s.label, 0, 0});
    if (!inserted && g->second.label != s.label) {
      throw InvalidArgumentError("aggregate: video '" + key + "' has mixed labels");
    }
    g->second.votes += s.score > frame_threshold;
    g->second.total += 1;
  }
  std::vector<DetectionScore> out;
  out.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    out.push_back({static_cast<double>(g.votes) / static_cast<double>(g.total), g.label,
                   key});
  }
  return out;
}

struct EvalOptions {
  int jobs = 0;
  std::string model_root;
  Aggregation aggregation = Aggregation::kFrame;
};

struct CellResult {
  MetricsReport metrics;
  ConfusionCounts counts;
  double threshold = 0.5;
  Aggregation aggregation = Aggregation::kFrame;
  long scored = 0;
  long skipped_no_face = 0;
  long score_failures = 0;
  long attack_failures = 0;
};

/// One experiment cell: optionally attack the manifest into work_dir, score
/// it, reduce to the full metric set.
inline CellResult evaluate_cell(const DatasetManifest& manifest,
                                const std::string& detector_id,
                                const std::optional<AttackConfig>& attack,
                                double threshold,
                                const std::filesystem::path& work_dir,
                                const EvalOptions& options = {}) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw InvalidArgumentError("evaluate_cell: threshold must be in [0,1]");
  }
  CellResult cell;
  cell.threshold = threshold;

  const DatasetManifest* to_score = &manifest;
  DatasetManifest attacked;
  if (attack) {
    AttackRunOptions aopt;
    aopt.jobs = options.jobs;
    aopt.model_root = options.model_root;
    auto run = attack_dataset(manifest, *attack, work_dir, aopt);
    cell.attack_failures = run.failed;
    attacked = std::move(run.manifest);
    to_score = &attacked;
  }

  auto scored = score_dataset(*to_score, detector_factory(detector_id), options.jobs);
  cell.aggregation = options.aggregation;
  cell.scored = static_cast<long>(scored.scores.size());
  cell.skipped_no_face = scored.skipped_no_face;
  cell.score_failures = static_cast<long>(scored.errors.size());

  if (options.aggregation == Aggregation::kVideoMajority) {
    const auto samples = aggregate_video_majority(scored.scores, *to_score, threshold);
    cell.counts = confusion(samples, 0.5);  // strict majority
    cell.metrics = compute_metrics(cell.counts, auc(samples));
  } else {
    cell.counts = confusion(scored.scores, threshold);
    cell.metrics = compute_metrics(cell.counts, auc(scored.scores));
  }
  return cell;
}

}  // namespace srattack
