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
#include <optional>
#include <vector>

#include "srattack/image.hpp"

namespace srattack {

/// Pixel-coordinate region of interest; x,y is the top-left corner.
struct Region {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

/// Mean absolute 4-neighbour Laplacian of the channel-mean intensity.
///
/// The grid/checkerboard artifacts deepfake generators leave behind are
/// high-frequency, so this is a cheap artifact-energy probe. Evaluated over
/// pixels inside `region` (whole image if absent) whose full 4-neighbourhood
/// lies inside the image; neighbours may cross the region border. Returns 0
/// when no pixel qualifies.
inline double mean_abs_laplacian(const ImageTensor& img,
                                 std::optional<Region> region = std::nullopt) {
  img.require_valid("mean_abs_laplacian");
  const int h = img.height, w = img.width;
  std::vector<double> gray(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray[static_cast<std::size_t>(y) * w + x] =
          (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
    }
  }
  int x0 = 1, y0 = 1, x1 = w - 1, y1 = h - 1;
  if (region) {
    x0 = std::max(x0, region->x);
    y0 = std::max(y0, region->y);
    x1 = std::min(x1, region->x + region->w);
    y1 = std::min(y1, region->y + region->h);
  }
  double acc = 0.0;
  long count = 0;
  for (int y = y0; y < y1; ++y) {
    const double* row = gray.data() + static_cast<std::size_t>(y) * w;
    for (int x = x0; x < x1; ++x) {
      const double lap = row[x - 1] + row[x + 1] + gray[static_cast<std::size_t>(y - 1) * w + x] +
                         gray[static_cast<std::size_t>(y + 1) * w + x] - 4.0 * row[x];
      acc += std::fabs(lap);
      ++count;
    }
  }
  return count > 0 ? acc / count : 0.0;
}

}  // namespace srattack
