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

#include <map>
#include <string>

#include "srattack/dnn_common.hpp"
#include "srattack/sr.hpp"

namespace srattack {

/// Adapter for externally trained SR networks (EDSR/BSRGAN-class exports),
/// one artifact per trained scale. I/O convention: float32 RGB in [0,1],
/// NCHW in, [1,3,K*h,K*w] out, re-quantized half away from zero. Nets are
/// loaded lazily and cached; instances are not safe for concurrent run().
class CvDnnSRBackend final : public SRBackend {
 public:
  CvDnnSRBackend(std::string id, std::map<int, std::string> scale_paths)
      : paths_(std::move(scale_paths)) {
    if (paths_.empty()) {
      throw BackendUnavailableError("sr backend '" + id + "': no model artifacts");
    }
    desc_.id = std::move(id);
    for (const auto& [k, path] : paths_) desc_.supported_scales.insert(k);
    desc_.model_artifact_path = paths_.begin()->second;
  }

  const SRBackendDescriptor& descriptor() const override { return desc_; }

  ImageTensor run(const ImageTensor& img, int k) override {
    auto it = nets_.find(k);
    if (it == nets_.end()) {
      it = nets_.emplace(k, detail::load_net(paths_.at(k))).first;
    }
    cv::Mat out;
    try {
      it->second.setInput(detail::to_unit_rgb_blob(img));
      out = it->second.forward();
    } catch (const cv::Exception& e) {
      throw BackendUnavailableError("sr backend '" + desc_.id + "' failed on K=" +
                                    std::to_string(k) + ": " + e.what());
    }
    if (out.dims != 4 || out.size[0] != 1 || out.size[1] != ImageTensor::kChannels) {
      throw BackendUnavailableError("sr backend '" + desc_.id +
                                    "': unexpected output tensor shape");
    }
    const int oh = out.size[2], ow = out.size[3];
    ImageTensor result(oh, ow);
    for (int c = 0; c < ImageTensor::kChannels; ++c) {
      const float* plane = out.ptr<float>(0, c);
      for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
          result.at(y, x, c) = quantize_u8(plane[y * ow + x] * 255.0);
        }
      }
    }
    return result;
  }

 private:
  std::map<int, std::string> paths_;
  std::map<int, cv::dnn::Net> nets_;
  SRBackendDescriptor desc_;
};

}  // namespace srattack
