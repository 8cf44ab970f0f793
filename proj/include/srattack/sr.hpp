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

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "srattack/errors.hpp"
#include "srattack/image.hpp"
#include "srattack/resample.hpp"

namespace srattack {

struct SRBackendDescriptor {
  std::string id;
  std::set<int> supported_scales;  // ignored when all_scales is set
  bool all_scales = false;         // analytic resamplers handle any K >= 1
  std::optional<std::string> model_artifact_path;

  bool supports(int k) const {
    return all_scales ? k >= 1 : supported_scales.count(k) > 0;
  }
};

/// Super-resolution port: produce a K*h x K*w image from an h x w one.
class SRBackend {
 public:
  virtual ~SRBackend() = default;
  virtual const SRBackendDescriptor& descriptor() const = 0;

  /// Raw model invocation; use srattack::upscale for the checked contract.
  virtual ImageTensor run(const ImageTensor& img, int k) = 0;
};

/// Checked upscale: validates the scale against the descriptor and the
/// output dimensions against the K*h x K*w contract.
inline ImageTensor upscale(const ImageTensor& img, int k, SRBackend& backend) {
  img.require_valid("upscale");
  if (k < 1) throw InvalidArgumentError("upscale: K must be >= 1");
  if (!backend.descriptor().supports(k)) {
    throw UnsupportedScaleError("upscale: backend '" + backend.descriptor().id +
                                "' does not support K=" + std::to_string(k));
  }
  ImageTensor out = backend.run(img, k);
  if (out.height != img.height * k || out.width != img.width * k) {
    throw BackendUnavailableError(
        "upscale: backend '" + backend.descriptor().id + "' returned " +
        std::to_string(out.height) + "x" + std::to_string(out.width) + " for K=" +
        std::to_string(k) + " on " + std::to_string(img.height) + "x" +
        std::to_string(img.width));
  }
  return out;
}

/// Deterministic analytic reference backend over the library resampler.
class ResampleSRBackend final : public SRBackend {
 public:
  explicit ResampleSRBackend(Filter filter) : filter_(filter) {
    desc_.id = filter_name(filter);
    desc_.all_scales = true;
  }
  const SRBackendDescriptor& descriptor() const override { return desc_; }
  ImageTensor run(const ImageTensor& img, int k) override {
    return resize(img, img.height * k, img.width * k, filter_);
  }

 private:
  Filter filter_;
  SRBackendDescriptor desc_;
};

/// Pass-through backend; only K=1 is a coherent identity.
class IdentitySRBackend final : public SRBackend {
 public:
  IdentitySRBackend() { desc_ = {"identity", {1}, false, std::nullopt}; }
  const SRBackendDescriptor& descriptor() const override { return desc_; }
  ImageTensor run(const ImageTensor& img, int) override { return img; }

 private:
  SRBackendDescriptor desc_;
};

/// The attack's core transform: shrink by 1/K, SR back up by K, and when the
/// dimensions were not divisible by K, bicubic-correct to the original size.
/// Output dimensions always equal input dimensions.
inline ImageTensor sr_roundtrip(const ImageTensor& img, int k, SRBackend& backend) {
  const ImageTensor small = downscale(img, k);
  ImageTensor up = upscale(small, k, backend);
  if (up.height != img.height || up.width != img.width) {
    up = resize(up, img.height, img.width, Filter::kBicubic);
  }
  return up;
}

}  // namespace srattack
