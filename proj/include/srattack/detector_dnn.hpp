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
#include <fstream>
#include <string>

#include <json.hpp>

#include "srattack/detector.hpp"
#include "srattack/dnn_common.hpp"
#include "srattack/resample.hpp"

namespace srattack {

struct DnnClassifierConfig {
  std::string model_path;
  int input_w = 224;
  int input_h = 224;
  // How the net's output becomes P(fake): a ready score, a single logit, or
  // a (pristine, fake) logit pair.
  enum class Output { kScore, kLogit, kTwoClassLogits } output = Output::kScore;
};

/// Adapter for externally trained binary classifiers (ResNet50/Swin/Xception
/// -class exports). Input frames are bicubic-resized to the model's input
/// size by the library resampler, so scoring stays deterministic.
class CvDnnClassifier final : public Detector {
 public:
  explicit CvDnnClassifier(DnnClassifierConfig config)
      : config_(std::move(config)), net_(detail::load_net(config_.model_path)) {}

  std::string id() const override { return "dnn:" + config_.model_path; }

  double score(const ImageTensor& img) override {
    ImageTensor sized = img;
    if (img.height != config_.input_h || img.width != config_.input_w) {
      sized = resize(img, config_.input_h, config_.input_w, Filter::kBicubic);
    }
    cv::Mat out;
    try {
      net_.setInput(detail::to_unit_rgb_blob(sized));
      out = net_.forward();
    } catch (const cv::Exception& e) {
      throw Error("classifier '" + config_.model_path + "' failed: " + e.what());
    }
    const float* v = out.ptr<float>();
    switch (config_.output) {
      case DnnClassifierConfig::Output::kScore:
        return std::clamp(static_cast<double>(v[0]), 0.0, 1.0);
      case DnnClassifierConfig::Output::kLogit:
        return 1.0 / (1.0 + std::exp(-static_cast<double>(v[0])));
      case DnnClassifierConfig::Output::kTwoClassLogits: {
        if (out.total() < 2) {
          throw BackendUnavailableError("classifier '" + config_.model_path +
                                        "': expected 2 logits");
        }
        const double a = v[0], b = v[1];  // (pristine, fake)
        const double m = std::max(a, b);
        const double ea = std::exp(a - m), eb = std::exp(b - m);
        return eb / (ea + eb);
      }
    }
    return 0.0;
  }

 private:
  DnnClassifierConfig config_;
  cv::dnn::Net net_;
};

namespace detail {

inline DnnClassifierConfig dnn_classifier_config_from_json(
    const nlohmann::json& j, const std::filesystem::path& base) {
  DnnClassifierConfig cfg;
  std::filesystem::path model = j.at("model").get<std::string>();
  cfg.model_path = model.is_absolute() ? model.string() : (base / model).string();
  cfg.input_w = j.value("input_w", cfg.input_w);
  cfg.input_h = j.value("input_h", cfg.input_h);
  const std::string mode = j.value("output", "score");
  if (mode == "score") cfg.output = DnnClassifierConfig::Output::kScore;
  else if (mode == "logit") cfg.output = DnnClassifierConfig::Output::kLogit;
  else if (mode == "two_class_logits") cfg.output = DnnClassifierConfig::Output::kTwoClassLogits;
  else throw InvalidArgumentError("unknown classifier output mode '" + mode + "'");
  return cfg;
}

}  // namespace detail

/// Detector registry.
///
///   "const:<v>"                  constant-score stub
///   "toy"                        toy artifact-energy detector, defaults
///   "toy:<thr>"                  fitted threshold
///   "toy:<thr>:<x>,<y>,<w>,<h>"  threshold + face-box restriction
///   <path>.json                  detector artifact (type "toy" or
///                                "dnn_classifier"; relative model paths
///                                resolve against the artifact's directory)
inline std::unique_ptr<Detector> make_detector(const std::string& spec) {
  if (spec.rfind("const:", 0) == 0) {
    return std::make_unique<ConstantDetector>(std::stod(spec.substr(6)));
  }
  if (spec == "toy" || spec.rfind("toy:", 0) == 0) {
    ToyDetectorConfig cfg;
    if (spec.size() > 4) {
      const std::string rest = spec.substr(4);
      const auto colon = rest.find(':');
      cfg.laplacian_threshold = std::stod(rest.substr(0, colon));
      if (colon != std::string::npos) {
        Region r{};
        if (std::sscanf(rest.c_str() + colon + 1, "%d,%d,%d,%d", &r.x, &r.y, &r.w,
                        &r.h) != 4) {
          throw InvalidArgumentError("bad toy detector face box in '" + spec + "'");
        }
        cfg.face_box = r;
      }
    }
    return std::make_unique<ToyArtifactDetector>(cfg);
  }
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    std::ifstream in(spec);
    if (!in) throw BackendUnavailableError("detector artifact not found: " + spec);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw BackendUnavailableError("bad detector artifact " + spec + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    const auto base = std::filesystem::path(spec).parent_path();
    if (type == "toy") {
      return std::make_unique<ToyArtifactDetector>(toy_config_from_json(j));
    }
    if (type == "dnn_classifier") {
      return std::make_unique<CvDnnClassifier>(
          detail::dnn_classifier_config_from_json(j, base));
    }
    throw BackendUnavailableError("unknown detector artifact type '" + type + "' in " +
                                  spec);
  }
  throw InvalidArgumentError("unknown detector spec '" + spec + "'");
}

inline DetectorFactory detector_factory(std::string spec) {
  return [spec = std::move(spec)] { return make_detector(spec); };
}

}  // namespace srattack
