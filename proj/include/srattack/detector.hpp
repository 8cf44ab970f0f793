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

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "srattack/artifacts.hpp"
#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

/// Deepfake-detector port: one image in, P(fake) in [0, 1] out.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string id() const = 0;
  virtual double score(const ImageTensor& img) = 0;
};

/// A detector instance per worker; implementations need not be thread-safe.
using DetectorFactory = std::function<std::unique_ptr<Detector>()>;

class ConstantDetector final : public Detector {
 public:
  explicit ConstantDetector(double value) : value_(value) {
    if (value < 0.0 || value > 1.0) {
      throw InvalidArgumentError("ConstantDetector: score must be in [0,1]");
    }
  }
  std::string id() const override { return "const:" + std::to_string(value_); }
  double score(const ImageTensor&) override { return value_; }

 private:
  double value_;
};

struct ToyDetectorConfig {
  double laplacian_threshold = 12.0;
  std::optional<Region> face_box;
};

/// Desk-scale stand-in for a trained detector: deepfake generators leave
/// high-frequency residue, so score the artifact energy in the face region.
/// score = logistic((E - t) / t) with E = mean |Laplacian|; E == t maps to
/// 0.5, so thresholding scores at 0.5 is exactly thresholding energy at t.
class ToyArtifactDetector final : public Detector {
 public:
  explicit ToyArtifactDetector(ToyDetectorConfig config) : config_(config) {
    if (!(config.laplacian_threshold > 0.0)) {
      throw InvalidArgumentError("ToyArtifactDetector: threshold must be > 0");
    }
  }

  std::string id() const override {
    std::string s = "toy:" + std::to_string(config_.laplacian_threshold);
    if (config_.face_box) {
      s += ":" + std::to_string(config_.face_box->x) + "," +
           std::to_string(config_.face_box->y) + "," +
           std::to_string(config_.face_box->w) + "," +
           std::to_string(config_.face_box->h);
    }
    return s;
  }

  double score(const ImageTensor& img) override {
    const double e = mean_abs_laplacian(img, config_.face_box);
    const double z = (e - config_.laplacian_threshold) / config_.laplacian_threshold;
    return 1.0 / (1.0 + std::exp(-z));
  }

  const ToyDetectorConfig& config() const { return config_; }

 private:
  ToyDetectorConfig config_;
};

inline nlohmann::json toy_artifact_json(const ToyDetectorConfig& cfg,
                                        nlohmann::json metadata = {}) {
  nlohmann::json j{{"type", "toy"}, {"laplacian_threshold", cfg.laplacian_threshold}};
  if (cfg.face_box) {
    j["face_box"] = {cfg.face_box->x, cfg.face_box->y, cfg.face_box->w, cfg.face_box->h};
  }
  if (!metadata.is_null() && !metadata.empty()) j["metadata"] = std::move(metadata);
  return j;
}

inline ToyDetectorConfig toy_config_from_json(const nlohmann::json& j) {
  ToyDetectorConfig cfg;
  cfg.laplacian_threshold = j.at("laplacian_threshold").get<double>();
  if (j.contains("face_box")) {
    const auto& b = j["face_box"];
    cfg.face_box = Region{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(),
                          b.at(3).get<int>()};
  }
  return cfg;
}

}  // namespace srattack
