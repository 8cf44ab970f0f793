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

// Id-string registries for the attack-side ports (face detectors and SR
// backends). Deepfake-detector construction deliberately lives elsewhere:
// nothing reachable from the attack engine can accept one.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include "srattack/face.hpp"
#include "srattack/face_dnn.hpp"
#include "srattack/sr.hpp"
#include "srattack/sr_dnn.hpp"

namespace srattack {

/// Root directory for model artifacts; the SRATTACK_MODEL_ROOT environment
/// variable when unset.
inline std::string resolve_model_root(const std::string& explicit_root = {}) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("SRATTACK_MODEL_ROOT")) return env;
  return ".";
}

/// Face-detector registry.
///
///   "full-frame"            whole frame, confidence 1.0
///   "none"                  never finds a face
///   "fixed:<x>,<y>,<w>,<h>" preconfigured box
///   "dnn:<path>"            SSD-style neural detector; <path> is a model
///                           file or a .json config next to one
inline std::unique_ptr<FaceDetector> make_face_detector(const std::string& spec) {
  if (spec == "full-frame") return std::make_unique<FullFrameDetector>();
  if (spec == "none") return std::make_unique<NoFaceDetector>();
  if (spec.rfind("fixed:", 0) == 0) {
    BoundingBox b;
    if (std::sscanf(spec.c_str() + 6, "%d,%d,%d,%d", &b.x, &b.y, &b.w, &b.h) != 4) {
      throw InvalidArgumentError("bad fixed-box detector spec '" + spec + "'");
    }
    b.confidence = 1.0;
    return std::make_unique<FixedBoxDetector>(b);
  }
  if (spec.rfind("dnn:", 0) == 0) {
    const std::string path = spec.substr(4);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
      std::ifstream in(path);
      if (!in) throw BackendUnavailableError("face detector config not found: " + path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailableError("bad face detector config " + path + ": " +
                                      e.what());
      }
      return std::make_unique<CvDnnFaceDetector>(
          dnn_face_config_from_json(j, std::filesystem::path(path).parent_path()));
    }
    DnnFaceDetectorConfig cfg;
    cfg.model_path = path;
    return std::make_unique<CvDnnFaceDetector>(cfg);
  }
  throw InvalidArgumentError("unknown face detector spec '" + spec + "'");
}

/// SR-backend registry.
///
///   "bicubic" | "bilinear" | "nearest"  analytic resamplers, any K
///   "identity"                          pass-through, K=1 only
///   "dnn:<path>:<K>"                    one model artifact at one scale
///   anything else (e.g. "edsr")         <model_root>/<id>_x<K>.onnx per
///                                       scale, K in 1..8
inline std::unique_ptr<SRBackend> make_sr_backend(const std::string& spec,
                                                  const std::string& model_root = {}) {
  if (spec == "bicubic") return std::make_unique<ResampleSRBackend>(Filter::kBicubic);
  if (spec == "bilinear") return std::make_unique<ResampleSRBackend>(Filter::kBilinear);
  if (spec == "nearest") return std::make_unique<ResampleSRBackend>(Filter::kNearest);
  if (spec == "identity") return std::make_unique<IdentitySRBackend>();
  if (spec.rfind("dnn:", 0) == 0) {
    const auto last_colon = spec.rfind(':');
    if (last_colon == 3) {
      throw InvalidArgumentError("sr backend spec '" + spec + "' is missing a scale");
    }
    const std::string path = spec.substr(4, last_colon - 4);
    const int k = std::atoi(spec.c_str() + last_colon + 1);
    if (k < 1) throw InvalidArgumentError("bad scale in sr backend spec '" + spec + "'");
    return std::make_unique<CvDnnSRBackend>(spec, std::map<int, std::string>{{k, path}});
  }

  const std::filesystem::path root = resolve_model_root(model_root);
  std::map<int, std::string> paths;
  for (int k = 1; k <= 8; ++k) {
    const auto p = root / (spec + "_x" + std::to_string(k) + ".onnx");
    if (std::filesystem::exists(p)) paths[k] = p.string();
  }
  if (paths.empty()) {
    throw BackendUnavailableError("sr backend '" + spec + "': no model artifacts (" +
                                  spec + "_x<K>.onnx) under " + root.string());
  }
  return std::make_unique<CvDnnSRBackend>(spec, std::move(paths));
}

}  // namespace srattack
