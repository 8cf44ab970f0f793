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
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

/// Pixel-coordinate face region. (x, y) is the top-left corner.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double confidence = 1.0;

  bool within(const ImageTensor& frame) const {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= frame.width &&
           y + h <= frame.height;
  }

  friend bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
  }
};

/// Intersect a detector box with the frame. Detectors routinely overflow at
/// frame edges, so this clamps silently; a box entirely outside comes back
/// empty.
inline std::optional<BoundingBox> clamp_box(const BoundingBox& box, int frame_w,
                                            int frame_h) {
  const int x0 = std::clamp(box.x, 0, frame_w);
  const int y0 = std::clamp(box.y, 0, frame_h);
  const int x1 = std::clamp(box.x + box.w, 0, frame_w);
  const int y1 = std::clamp(box.y + box.h, 0, frame_h);
  if (x1 - x0 < 1 || y1 - y0 < 1) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0, box.confidence};
}

/// Grow a box by `margin` * size on every side (rounded), for detector-box
/// conventions that crop tighter than the training data did.
inline BoundingBox expand_box(const BoundingBox& box, double margin) {
  if (margin <= 0.0) return box;
  const int dx = static_cast<int>(std::lround(box.w * margin));
  const int dy = static_cast<int>(std::lround(box.h * margin));
  return BoundingBox{box.x - dx, box.y - dy, box.w + 2 * dx, box.h + 2 * dy,
                     box.confidence};
}

struct FaceCrop {
  ImageTensor image;
  BoundingBox source_box;
  std::string frame_id;
};

/// Copy the box region out of the frame, bit-identical.
inline FaceCrop crop(const ImageTensor& frame, const BoundingBox& box,
                     std::string frame_id = {}) {
  frame.require_valid("crop");
  if (!box.within(frame)) {
    throw InvalidArgumentError("crop: box (" + std::to_string(box.x) + "," +
                               std::to_string(box.y) + "," + std::to_string(box.w) + "," +
                               std::to_string(box.h) + ") not within " +
                               std::to_string(frame.width) + "x" +
                               std::to_string(frame.height) + " frame");
  }
  FaceCrop out{ImageTensor(box.h, box.w), box, std::move(frame_id)};
  const std::size_t row_bytes = static_cast<std::size_t>(box.w) * ImageTensor::kChannels;
  for (int y = 0; y < box.h; ++y) {
    std::copy_n(&frame.pixels[frame.index(box.y + y, box.x, 0)], row_bytes,
                &out.image.pixels[out.image.index(y, 0, 0)]);
  }
  return out;
}

/// Return a copy of the frame with the crop written back into its source box.
/// Every pixel outside the box is untouched; the input frame is not mutated.
inline ImageTensor paste(const ImageTensor& frame, const FaceCrop& face) {
  frame.require_valid("paste");
  face.image.require_valid("paste");
  const BoundingBox& box = face.source_box;
  if (face.image.height != box.h || face.image.width != box.w) {
    throw InvalidArgumentError("paste: crop is " + std::to_string(face.image.height) +
                               "x" + std::to_string(face.image.width) + " but box is " +
                               std::to_string(box.h) + "x" + std::to_string(box.w));
  }
  if (!box.within(frame)) {
    throw InvalidArgumentError("paste: box not within frame");
  }
  ImageTensor out = frame;
  const std::size_t row_bytes = static_cast<std::size_t>(box.w) * ImageTensor::kChannels;
  for (int y = 0; y < box.h; ++y) {
    std::copy_n(&face.image.pixels[face.image.index(y, 0, 0)], row_bytes,
                &out.pixels[out.index(box.y + y, box.x, 0)]);
  }
  return out;
}

/// Face-detector port. Implementations may hold model state; one instance
/// per worker, or internal synchronization, is the caller's job.
class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  virtual std::string id() const = 0;

  /// Raw detections; may overflow the frame. Throws BackendUnavailableError
  /// when the backend itself is broken — an empty list means "no face".
  virtual std::vector<BoundingBox> detect(const ImageTensor& frame) = 0;
};

/// Detection with the port contract applied: boxes clamped to the frame,
/// degenerate ones dropped, sorted by descending confidence.
inline std::vector<BoundingBox> detect_faces(const ImageTensor& frame,
                                             FaceDetector& detector) {
  frame.require_valid("detect_faces");
  std::vector<BoundingBox> out;
  for (const auto& raw : detector.detect(frame)) {
    if (auto b = clamp_box(raw, frame.width, frame.height)) out.push_back(*b);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.confidence > b.confidence;
  });
  return out;
}

/// Stub: the whole frame is the face.
class FullFrameDetector final : public FaceDetector {
 public:
  std::string id() const override { return "full-frame"; }
  std::vector<BoundingBox> detect(const ImageTensor& frame) override {
    return {BoundingBox{0, 0, frame.width, frame.height, 1.0}};
  }
};

/// Stub: a preconfigured box, for tests and for corpora with a known face
/// region. Frames smaller than the box yield the clamped intersection.
class FixedBoxDetector final : public FaceDetector {
 public:
  explicit FixedBoxDetector(BoundingBox box) : box_(box) {}
  std::string id() const override {
    return "fixed:" + std::to_string(box_.x) + "," + std::to_string(box_.y) + "," +
           std::to_string(box_.w) + "," + std::to_string(box_.h);
  }
  std::vector<BoundingBox> detect(const ImageTensor&) override { return {box_}; }

 private:
  BoundingBox box_;
};

/// Stub that never finds a face; exercises the skipped-frame path.
class NoFaceDetector final : public FaceDetector {
 public:
  std::string id() const override { return "none"; }
  std::vector<BoundingBox> detect(const ImageTensor&) override { return {}; }
};

}  // namespace srattack
