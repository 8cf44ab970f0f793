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
#include <cstdint>
#include <string>
#include <vector>

#include "srattack/errors.hpp"

namespace srattack {

/// 8-bit RGB raster, row-major, interleaved channels. The unit every
/// pipeline stage consumes and produces.
struct ImageTensor {
  static constexpr int kChannels = 3;

  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * kChannels

  ImageTensor() = default;

  ImageTensor(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w) {
    if (h < 1 || w < 1) {
      throw InvalidArgumentError("ImageTensor: dimensions must be >= 1, got " +
                                 std::to_string(h) + "x" + std::to_string(w));
    }
    pixels.assign(static_cast<std::size_t>(h) * w * kChannels, fill);
  }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * kChannels + c;
  }

  std::uint8_t at(int y, int x, int c) const { return pixels[index(y, x, c)]; }
  std::uint8_t& at(int y, int x, int c) { return pixels[index(y, x, c)]; }

  bool valid() const {
    return height >= 1 && width >= 1 &&
           pixels.size() == static_cast<std::size_t>(height) * width * kChannels;
  }

  void require_valid(const char* who) const {
    if (!valid()) {
      throw InvalidArgumentError(std::string(who) + ": malformed image tensor (" +
                                 std::to_string(height) + "x" + std::to_string(width) +
                                 ", buffer " + std::to_string(pixels.size()) + ")");
    }
  }

  bool same_size(const ImageTensor& o) const {
    return height == o.height && width == o.width;
  }

  friend bool operator==(const ImageTensor& a, const ImageTensor& b) {
    return a.height == b.height && a.width == b.width && a.pixels == b.pixels;
  }
};

/// Round half away from zero, then clamp to [0, 255]. The one quantization
/// rule used everywhere float values become 8-bit.
inline std::uint8_t quantize_u8(double v) {
  long r = std::lround(v);  // lround rounds halfway cases away from zero
  if (r < 0) return 0;
  if (r > 255) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace srattack
