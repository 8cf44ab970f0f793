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
#include <string>

#include <opencv2/dnn.hpp>

#include "srattack/cv_bridge.hpp"
#include "srattack/errors.hpp"

namespace srattack::detail {

/// readNet with the library's error taxonomy. Missing and corrupt artifacts
/// both surface as BackendUnavailableError.
inline cv::dnn::Net load_net(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw BackendUnavailableError("model artifact not found: " + path);
  }
  try {
    cv::dnn::Net net = cv::dnn::readNet(path);
    if (net.empty()) {
      throw BackendUnavailableError("model artifact is empty: " + path);
    }
    return net;
  } catch (const cv::Exception& e) {
    throw BackendUnavailableError("cannot load model artifact " + path + ": " +
                                  e.what());
  }
}

/// The adapters' pinned tensor convention: float32 RGB in [0,1], NCHW.
inline cv::Mat to_unit_rgb_blob(const ImageTensor& img) {
  return cv::dnn::blobFromImage(rgb_view(img), 1.0 / 255.0, cv::Size(),
                                cv::Scalar(), /*swapRB=*/false, /*crop=*/false);
}

}  // namespace srattack::detail
