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
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srattack/augment.hpp"
#include "srattack/detector.hpp"
#include "srattack/io_image.hpp"
#include "srattack/manifest.hpp"
#include "srattack/parallel.hpp"
#include "srattack/util.hpp"
#include "srattack/version.hpp"

namespace srattack {

struct TrainSample {
  ImageTensor image;
  Label label = Label::kPristine;
};

/// Trainer port: consume a pull-iterator of augmented samples plus
/// hyperparameters, produce a detector artifact (JSON). The toolkit ships
/// the toy trainer; real deep-learning trainers plug in from outside.
class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::string id() const = 0;
  virtual nlohmann::json train(
      const std::function<std::optional<TrainSample>()>& next_sample,
      const nlohmann::json& hyperparams) = 0;
};

/// Fits the toy detector's energy threshold with a 1-D sweep maximizing
/// balanced accuracy over the (augmented) stream. Among equally good
/// thresholds it takes the midpoint of the widest gap — the max-margin
/// choice, and a deterministic one.
class ToyTrainer final : public Trainer {
 public:
  std::string id() const override { return "toy"; }

  nlohmann::json train(const std::function<std::optional<TrainSample>()>& next_sample,
                       const nlohmann::json& hyperparams) override {
    std::optional<Region> face_box;
    if (hyperparams.contains("face_box")) {
      const auto& b = hyperparams["face_box"];
      face_box = Region{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                        b.at(3).get<int>()};
    }
    std::vector<std::pair<double, Label>> energies;
    while (auto s = next_sample()) {
      energies.emplace_back(mean_abs_laplacian(s->image, face_box), s->label);
    }
    if (energies.empty()) {
      throw InvalidArgumentError("toy trainer: empty training stream");
    }
    long fakes = 0;
    for (const auto& [e, l] : energies) fakes += l == Label::kFake;
    if (fakes == 0 || fakes == static_cast<long>(energies.size())) {
      throw InvalidArgumentError("toy trainer: both classes required, got " +
                                 std::to_string(fakes) + " fake of " +
                                 std::to_string(energies.size()));
    }

    std::sort(energies.begin(), energies.end());
    const double threshold = sweep_threshold(energies, fakes);

    ToyDetectorConfig cfg;
    cfg.laplacian_threshold = threshold;
    cfg.face_box = face_box;
    nlohmann::json metadata{{"trainer", "toy"},
                            {"samples", energies.size()},
                            {"balanced_accuracy", best_balanced_accuracy_},
                            {"version", kVersion}};
    if (hyperparams.contains("metadata")) metadata.update(hyperparams["metadata"]);
    return toy_artifact_json(cfg, metadata);
  }

  double best_balanced_accuracy() const { return best_balanced_accuracy_; }

 private:
  // energies sorted ascending. Predict fake iff E > t; scan every boundary
  // between adjacent samples (plus the two outer ones).
  double sweep_threshold(const std::vector<std::pair<double, Label>>& energies,
                         long total_fakes) {
    const long total_pristine = static_cast<long>(energies.size()) - total_fakes;
    // Walking the boundary left to right, fakes at or below it are misses.
    long fn = 0, tn = 0;
    double best_acc = -1.0, best_gap = -1.0, best_threshold = 0.0;
    const double span = energies.back().first - energies.front().first;
    const double pad = std::max(1.0, span);

    const auto consider = [&](double lo, double hi) {
      const double acc =
          0.5 * (static_cast<double>(total_fakes - fn) / total_fakes +
                 static_cast<double>(tn) / total_pristine);
      const double gap = hi - lo;
      if (acc > best_acc + 1e-12 || (acc > best_acc - 1e-12 && gap > best_gap)) {
        best_acc = std::max(acc, best_acc);
        best_gap = gap;
        best_threshold = 0.5 * (lo + hi);
      }
    };

    consider(energies.front().first - pad, energies.front().first);
    for (std::size_t i = 0; i < energies.size(); ++i) {
      (energies[i].second == Label::kFake ? fn : tn)++;
      const double hi =
          i + 1 < energies.size() ? energies[i + 1].first : energies[i].first + pad;
      if (hi > energies[i].first) consider(energies[i].first, hi);
    }
    best_balanced_accuracy_ = best_acc;
    return std::max(best_threshold, 1e-9);
  }

  double best_balanced_accuracy_ = 0.0;
};

struct TrainOptions {
  int jobs = 0;
  int epochs = 1;  // stream passes for the toy trainer
  std::string model_root;
};

/// Train a detector on the manifest through the augmentation policy.
/// The augmented stream order is (epoch-major) manifest order, and sample
/// index e*N+i drives the rng, so the stream is bit-reproducible.
inline nlohmann::json train_with_augmentation(const DatasetManifest& manifest,
                                              const AugmentationPolicy& policy,
                                              Trainer& trainer,
                                              const TrainOptions& options = {}) {
  manifest.validate();
  if (manifest.entries.empty()) {
    throw InvalidArgumentError("train_with_augmentation: empty manifest");
  }
  const std::size_t n = manifest.entries.size();
  const std::size_t total = n * static_cast<std::size_t>(std::max(1, options.epochs));

  // Materialize the augmented stream in parallel (per-index rng keeps this
  // identical to a sequential pass), then feed the trainer in order.
  std::vector<TrainSample> samples(total);
  const int workers = options.jobs > 0 ? options.jobs : default_jobs();
  std::vector<std::unique_ptr<Augmenter>> augmenters(
      static_cast<std::size_t>(std::max(1, workers)));
  parallel_for(total, workers, [&](std::size_t idx, int worker) {
    auto& aug = augmenters[static_cast<std::size_t>(worker)];
    if (!aug) aug = std::make_unique<Augmenter>(policy, options.model_root);
    const ManifestEntry& entry = manifest.entries[idx % n];
    samples[idx] = {aug->augment(load_image(entry.path), idx), entry.label};
  });

  std::size_t cursor = 0;
  const auto next = [&]() -> std::optional<TrainSample> {
    if (cursor >= samples.size()) return std::nullopt;
    return std::move(samples[cursor++]);
  };

  nlohmann::json hyperparams{
      {"metadata",
       {{"policy", policy.to_json()},
        {"policy_hash", to_hex(fnv1a64(policy.to_json().dump()))},
        {"epochs", options.epochs},
        {"external_trainer_defaults", {{"learning_rate", 0.01}, {"epochs", 30}}}}}};
  if (manifest.metadata.contains("face_box")) {
    hyperparams["face_box"] = manifest.metadata["face_box"];
  }
  return trainer.train(next, hyperparams);
}

inline void save_detector_artifact(const nlohmann::json& artifact,
                                   const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IngestionError("cannot write detector artifact " + path.string());
  out << artifact.dump(2) << "\n";
}

}  // namespace srattack
