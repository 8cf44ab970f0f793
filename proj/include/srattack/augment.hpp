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

// Training-time augmentation: stochastic SR round-trips (the defense) plus
// the usual baseline ops. Everything is derived from (policy seed, sample
// index), so an augmented stream is reproducible sample by sample.

#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srattack/image.hpp"
#include "srattack/io_image.hpp"
#include "srattack/registry.hpp"
#include "srattack/sr.hpp"
#include "srattack/util.hpp"

namespace srattack {

enum class BaselineOp { kNoise, kJpegCompression, kGeometric };

inline const char* baseline_op_name(BaselineOp op) {
  switch (op) {
    case BaselineOp::kNoise: return "noise";
    case BaselineOp::kJpegCompression: return "jpeg_compression";
    case BaselineOp::kGeometric: return "geometric";
  }
  return "?";
}

inline BaselineOp parse_baseline_op(const std::string& s) {
  if (s == "noise") return BaselineOp::kNoise;
  if (s == "jpeg_compression") return BaselineOp::kJpegCompression;
  if (s == "geometric") return BaselineOp::kGeometric;
  throw InvalidArgumentError("unknown baseline op '" + s + "'");
}

struct AugmentationPolicy {
  double sr_probability = 0.5;
  std::vector<std::pair<std::string, int>> sr_choices;  // (backend id, K)
  std::vector<BaselineOp> baseline_ops;
  std::uint64_t seed = 0;
  // Whether a triggered SR round-trip replaces the baseline ops for that
  // sample or runs alongside them.
  enum class Composition { kAlongside, kReplace } composition = Composition::kAlongside;

  void validate() const {
    if (sr_probability < 0.0 || sr_probability > 1.0) {
      throw InvalidArgumentError("augmentation policy: sr_probability must be in [0,1]");
    }
    if (sr_probability > 0.0 && sr_choices.empty()) {
      throw InvalidArgumentError(
          "augmentation policy: sr_choices must be non-empty when SR can trigger");
    }
    for (const auto& [id, k] : sr_choices) {
      if (id.empty() || k < 1) {
        throw InvalidArgumentError("augmentation policy: bad sr choice (" + id + ", " +
                                   std::to_string(k) + ")");
      }
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json choices = nlohmann::json::array();
    for (const auto& [id, k] : sr_choices) choices.push_back({id, k});
    nlohmann::json ops = nlohmann::json::array();
    for (const auto op : baseline_ops) ops.push_back(baseline_op_name(op));
    return {{"sr_probability", sr_probability},
            {"sr_choices", choices},
            {"baseline_ops", ops},
            {"seed", seed},
            {"composition",
             composition == Composition::kAlongside ? "alongside" : "replace"}};
  }

  static AugmentationPolicy from_json(const nlohmann::json& j) {
    AugmentationPolicy p;
    p.sr_probability = j.value("sr_probability", p.sr_probability);
    if (j.contains("sr_choices")) {
      for (const auto& c : j["sr_choices"]) {
        p.sr_choices.emplace_back(c.at(0).get<std::string>(), c.at(1).get<int>());
      }
    }
    if (j.contains("baseline_ops")) {
      for (const auto& o : j["baseline_ops"]) {
        p.baseline_ops.push_back(parse_baseline_op(o.get<std::string>()));
      }
    }
    p.seed = j.value("seed", p.seed);
    const std::string comp = j.value("composition", "alongside");
    if (comp == "alongside") p.composition = Composition::kAlongside;
    else if (comp == "replace") p.composition = Composition::kReplace;
    else throw InvalidArgumentError("unknown composition '" + comp + "'");
    p.validate();
    return p;
  }
};

namespace detail {

inline ImageTensor flip_horizontal(const ImageTensor& img) {
  ImageTensor out(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        out.at(y, x, c) = img.at(y, img.width - 1 - x, c);
      }
    }
  }
  return out;
}

// Rotation about the image center plus translation, inverse-mapped with
// bilinear sampling and edge clamping.
inline ImageTensor warp_affine(const ImageTensor& img, double angle_deg, double tx,
                               double ty) {
  const double a = angle_deg * 3.14159265358979323846 / 180.0;
  const double cs = std::cos(a), sn = std::sin(a);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  ImageTensor out(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx - tx, dy = y - cy - ty;
      const double sx = cs * dx + sn * dy + cx;
      const double sy = -sn * dx + cs * dy + cy;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      const auto cl = [&](int v, int hi) { return std::clamp(v, 0, hi); };
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        const double v00 = img.at(cl(y0, img.height - 1), cl(x0, img.width - 1), c);
        const double v01 = img.at(cl(y0, img.height - 1), cl(x0 + 1, img.width - 1), c);
        const double v10 = img.at(cl(y0 + 1, img.height - 1), cl(x0, img.width - 1), c);
        const double v11 =
            img.at(cl(y0 + 1, img.height - 1), cl(x0 + 1, img.width - 1), c);
        const double v = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
                         fy * ((1 - fx) * v10 + fx * v11);
        out.at(y, x, c) = quantize_u8(v);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Applies an AugmentationPolicy. Resolves the SR backends once, at
/// construction — a bad backend id fails here, not mid-epoch. One instance
/// per worker for parallel prefetch.
class Augmenter {
 public:
  explicit Augmenter(AugmentationPolicy policy, const std::string& model_root = {})
      : policy_(std::move(policy)) {
    policy_.validate();
    for (const auto& [id, k] : policy_.sr_choices) {
      auto backend = make_sr_backend(id, model_root);
      if (!backend->descriptor().supports(k)) {
        throw BackendUnavailableError("augmentation policy: backend '" + id +
                                      "' does not support K=" + std::to_string(k));
      }
      backends_.push_back(std::move(backend));
    }
  }

  const AugmentationPolicy& policy() const { return policy_; }

  /// Augment the sample at `index` of the stream. Same (policy seed, index,
  /// image) always yields the same bytes.
  ImageTensor augment(const ImageTensor& img, std::uint64_t index) {
    img.require_valid("augment");
    std::mt19937_64 rng(derive_seed(policy_.seed, index));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ImageTensor out = img;
    const bool do_sr = unit(rng) < policy_.sr_probability;
    if (do_sr) {
      std::uniform_int_distribution<std::size_t> pick(0, backends_.size() - 1);
      const std::size_t i = pick(rng);
      out = sr_roundtrip(out, policy_.sr_choices[i].second, *backends_[i]);
    }
    const bool run_baseline =
        !do_sr || policy_.composition == AugmentationPolicy::Composition::kAlongside;
    if (run_baseline) {
      for (const auto op : policy_.baseline_ops) {
        if (unit(rng) >= 0.5) continue;
        switch (op) {
          case BaselineOp::kNoise: {
            const double sigma = unit(rng) * 10.0;
            std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1e-12);
            for (auto& p : out.pixels) p = quantize_u8(p + noise(rng));
            break;
          }
          case BaselineOp::kJpegCompression: {
            std::uniform_int_distribution<int> q(60, 95);
            out = jpeg_roundtrip(out, q(rng));
            break;
          }
          case BaselineOp::kGeometric: {
            if (unit(rng) < 0.5) out = detail::flip_horizontal(out);
            std::uniform_real_distribution<double> deg(-5.0, 5.0);
            const double angle = deg(rng);
            const double tx = (unit(rng) - 0.5) * 0.1 * out.width;
            const double ty = (unit(rng) - 0.5) * 0.1 * out.height;
            out = detail::warp_affine(out, angle, tx, ty);
            break;
          }
        }
      }
    }
    return out;
  }

 private:
  AugmentationPolicy policy_;
  std::vector<std::unique_ptr<SRBackend>> backends_;
};

}  // namespace srattack
