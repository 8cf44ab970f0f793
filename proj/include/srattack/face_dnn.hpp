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

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "srattack/dnn_common.hpp"
#include "srattack/face.hpp"

namespace srattack {

struct DnnFaceDetectorConfig {
  std::string model_path;
  int input_w = 300;
  int input_h = 300;
  double scale = 1.0 / 255.0;       // pixel -> tensor scaling
  double mean[3] = {0.0, 0.0, 0.0}; // subtracted before scaling, RGB order
  bool swap_rb = false;             // feed BGR instead of RGB
  double confidence_threshold = 0.5;
};

/// Adapter for SSD-style pretrained face detectors: the network consumes one
/// resized frame and emits [1,1,N,7] rows of
/// (batch, class, confidence, x1, y1, x2, y2) with normalized corners.
class CvDnnFaceDetector final : public FaceDetector {
 public:
  explicit CvDnnFaceDetector(DnnFaceDetectorConfig config)
      : config_(std::move(config)), net_(detail::load_net(config_.model_path)) {}

  std::string id() const override { return "dnn:" + config_.model_path; }

  std::vector<BoundingBox> detect(const ImageTensor& frame) override {
    cv::Mat out;
    try {
      cv::Mat blob = cv::dnn::blobFromImage(
          rgb_view(frame), config_.scale, cv::Size(config_.input_w, config_.input_h),
          cv::Scalar(config_.mean[0], config_.mean[1], config_.mean[2]),
          config_.swap_rb, /*crop=*/false);
      net_.setInput(blob);
      out = net_.forward();
    } catch (const cv::Exception& e) {
      throw BackendUnavailableError("face detector '" + config_.model_path +
                                    "' failed: " + e.what());
    }
    if (out.total() % 7 != 0) {
      throw BackendUnavailableError("face detector '" + config_.model_path +
                                    "': output is not Nx7 detection rows");
    }
    const auto n = static_cast<int>(out.total() / 7);
    const float* rows = out.ptr<float>();
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < n; ++i) {
      const float* r = rows + static_cast<std::size_t>(i) * 7;
      const double conf = r[2];
      if (conf < config_.confidence_threshold) continue;
      const double x1 = r[3] * frame.width, y1 = r[4] * frame.height;
      const double x2 = r[5] * frame.width, y2 = r[6] * frame.height;
      BoundingBox b;
      b.x = static_cast<int>(std::lround(x1));
      b.y = static_cast<int>(std::lround(y1));
      b.w = static_cast<int>(std::lround(x2 - x1));
      b.h = static_cast<int>(std::lround(y2 - y1));
      b.confidence = std::clamp(conf, 0.0, 1.0);
      boxes.push_back(b);
    }
    return boxes;
  }

 private:
  DnnFaceDetectorConfig config_;
  cv::dnn::Net net_;
};

inline DnnFaceDetectorConfig dnn_face_config_from_json(const nlohmann::json& j,
                                                       const std::filesystem::path& base) {
  DnnFaceDetectorConfig cfg;
  std::filesystem::path model = j.at("model").get<std::string>();
  cfg.model_path = model.is_absolute() ? model.string() : (base / model).string();
  cfg.input_w = j.value("input_w", cfg.input_w);
  cfg.input_h = j.value("input_h", cfg.input_h);
  cfg.scale = j.value("scale", cfg.scale);
  cfg.swap_rb = j.value("swap_rb", cfg.swap_rb);
  cfg.confidence_threshold = j.value("confidence_threshold", cfg.confidence_threshold);
  if (j.contains("mean")) {
    for (int i = 0; i < 3; ++i) cfg.mean[i] = j["mean"].at(i).get<double>();
  }
  return cfg;
}

}  // namespace srattack
