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
#include <string>
#include <vector>

#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

enum class Filter { kNearest, kBilinear, kBicubic };

inline const char* filter_name(Filter f) {
  switch (f) {
    case Filter::kNearest: return "nearest";
    case Filter::kBilinear: return "bilinear";
    case Filter::kBicubic: return "bicubic";
  }
  return "?";
}

namespace detail {

// Keys cubic convolution kernel, a = -0.5. Support 2.
inline double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return a * (((x - 5.0) * x + 8.0) * x - 4.0);
  return 0.0;
}

inline double triangle_kernel(double x) {
  x = std::fabs(x);
  return x < 1.0 ? 1.0 - x : 0.0;
}

struct Tap {
  int first = 0;                 // first (clamped) source index
  std::vector<double> weights;   // normalized to sum 1
};

// One weight table per output coordinate along a single axis.
//
// Pixel centers sit at i + 0.5. When the axis shrinks, the kernel is widened
// by the scale factor (the Matlab/PIL antialias convention). Out-of-range
// taps are clamped to the edge pixel, and each weight vector is normalized so
// that a constant image stays exactly constant.
inline std::vector<Tap> make_taps(int in_size, int out_size, Filter filter) {
  const double scale = static_cast<double>(in_size) / out_size;
  const bool shrink = scale > 1.0;
  double radius;
  double (*kernel)(double);
  switch (filter) {
    case Filter::kBilinear: radius = 1.0; kernel = triangle_kernel; break;
    case Filter::kBicubic: radius = 2.0; kernel = cubic_kernel; break;
    default: radius = 0.0; kernel = nullptr; break;
  }
  const double kscale = shrink ? scale : 1.0;
  const double support = radius * kscale;

  std::vector<Tap> taps(out_size);
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale;
    int lo = static_cast<int>(std::floor(center - support + 0.5));
    int hi = static_cast<int>(std::floor(center + support + 0.5));
    if (hi <= lo) hi = lo + 1;
    Tap& t = taps[i];
    t.first = std::clamp(lo, 0, in_size - 1);
    const int last = std::clamp(hi - 1, 0, in_size - 1);
    t.weights.assign(static_cast<std::size_t>(last - t.first + 1), 0.0);
    double sum = 0.0;
    for (int k = lo; k < hi; ++k) {
      const double w = kernel((k + 0.5 - center) / kscale);
      const int kc = std::clamp(k, 0, in_size - 1);
      t.weights[kc - t.first] += w;
      sum += w;
    }
    if (sum != 0.0) {
      for (double& w : t.weights) w /= sum;
    } else {
      t.weights.assign(1, 1.0);
      t.first = std::clamp(static_cast<int>(center), 0, in_size - 1);
    }
  }
  return taps;
}

inline int nearest_index(int i, double scale, int in_size) {
  int s = static_cast<int>(std::floor((i + 0.5) * scale));
  return std::clamp(s, 0, in_size - 1);
}

}  // namespace detail

/// Resample to out_h x out_w with the named filter.
///
/// Separable: horizontal pass into a double-precision buffer, then vertical;
/// quantization (round half away from zero, clamp to [0,255]) happens once,
/// on the final output.
inline ImageTensor resize(const ImageTensor& img, int out_h, int out_w,
                          Filter filter) {
  img.require_valid("resize");
  if (out_h < 1 || out_w < 1) {
    throw InvalidArgumentError("resize: target dimensions must be positive, got " +
                               std::to_string(out_h) + "x" + std::to_string(out_w));
  }
  const int c = ImageTensor::kChannels;

  if (filter == Filter::kNearest) {
    ImageTensor out(out_h, out_w);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
      const int yi = detail::nearest_index(y, sy, img.height);
      for (int x = 0; x < out_w; ++x) {
        const int xi = detail::nearest_index(x, sx, img.width);
        for (int ch = 0; ch < c; ++ch) out.at(y, x, ch) = img.at(yi, xi, ch);
      }
    }
    return out;
  }

  const auto xt = detail::make_taps(img.width, out_w, filter);
  const auto yt = detail::make_taps(img.height, out_h, filter);

  // Horizontal pass: img.height rows of out_w samples.
  std::vector<double> mid(static_cast<std::size_t>(img.height) * out_w * c);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const auto& t = xt[x];
      double acc[3] = {0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        const double w = t.weights[k];
        const int xi = t.first + static_cast<int>(k);
        for (int ch = 0; ch < c; ++ch) acc[ch] += w * img.at(y, xi, ch);
      }
      const std::size_t o = (static_cast<std::size_t>(y) * out_w + x) * c;
      for (int ch = 0; ch < c; ++ch) mid[o + ch] = acc[ch];
    }
  }

  ImageTensor out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const auto& t = yt[y];
    for (int x = 0; x < out_w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        const double w = t.weights[k];
        const std::size_t o =
            (static_cast<std::size_t>(t.first + static_cast<int>(k)) * out_w + x) * c;
        for (int ch = 0; ch < c; ++ch) acc[ch] += w * mid[o + ch];
      }
      for (int ch = 0; ch < c; ++ch) out.at(y, x, ch) = quantize_u8(acc[ch]);
    }
  }
  return out;
}

/// Shrink by an integer factor K: output is floor(h/K) x floor(w/K), bicubic.
inline ImageTensor downscale(const ImageTensor& img, int k) {
  img.require_valid("downscale");
  if (k < 1) {
    throw InvalidArgumentError("downscale: K must be >= 1, got " + std::to_string(k));
  }
  const int oh = img.height / k;
  const int ow = img.width / k;
  if (oh < 1 || ow < 1) {
    throw DegenerateScaleError("downscale: K=" + std::to_string(k) +
                               " exceeds image dimensions " + std::to_string(img.height) +
                               "x" + std::to_string(img.width));
  }
  if (k == 1) return img;
  return resize(img, oh, ow, Filter::kBicubic);
}

}  // namespace srattack
